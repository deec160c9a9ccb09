// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_FEM_HPP
#define EPOD_FEM_HPP

#include <array>
#include <functional>
#include <string>

#include "epod/mesh.hpp"
#include "epod/sparse.hpp"

namespace epod {

using ScalarFn = std::function<double(double, double)>;

// Nodal values over all (n+1)^2 mesh nodes; Dirichlet fields carry
// explicit zeros on the boundary.
struct ScalarField {
  int n = 0;
  Vector values;
};

// P1 element matrices on an arbitrary triangle; exposed for the oracle
// tests. `coefficient` is the one-point (centroid) value of a.
Eigen::Matrix3d local_stiffness(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                                const std::array<double, 2>& p2, double coefficient);
Eigen::Matrix3d local_mass(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                           const std::array<double, 2>& p2);

// Full (n+1)^2 stiffness matrix of the bilinear form
//   A[i,j] = sum_T a(centroid_T) * \int_T grad phi_i . grad phi_j,
// the coefficient sampled once per triangle at its centroid. Throws if
// a_eval produces a non-positive value at any centroid (contrast
// violation).
SparseSymMatrix assemble_stiffness(const Mesh& mesh, const ScalarFn& a_eval);

// Exact P1 mass matrix over the whole domain.
SparseSymMatrix assemble_mass(const Mesh& mesh);

// Mass matrix of the L^2(mask) inner product, indexed by mask-local
// node ids. Only triangles whose three vertices lie inside the mask
// contribute, so for grid-aligned rectangles this is the exact L^2
// product on the rectangle.
SparseSymMatrix assemble_mass(const Mesh& mesh, const SubdomainMask& mask);

// One-point centroid quadrature load vector over all nodes.
Vector assemble_load(const Mesh& mesh, const ScalarFn& f_eval);

// Remove Dirichlet rows/columns, keeping the interior block (SPD).
SparseSymMatrix eliminate_dirichlet(const Mesh& mesh, const SparseSymMatrix& a);
Vector restrict_interior(const Mesh& mesh, const Vector& full);
ScalarField extend_with_zeros(const Mesh& mesh, const Vector& interior);

// Diagonal-PCG solve of the eliminated system to relative residual
// <= tol (default 1e-10); returns the full-node field with zero trace.
// Throws std::runtime_error on non-convergence, reporting the final
// residual.
ScalarField solve_dirichlet(const Mesh& mesh, const SparseSymMatrix& a_interior,
                            const Vector& load_full, double tol = 1.0e-10);

// One realization end to end: assemble, eliminate, solve.
ScalarField solve_realization(const Mesh& mesh, const ScalarFn& a_eval, const ScalarFn& f_eval,
                              double tol = 1.0e-10);

// sqrt(v^T M v) over the mask (any field defined on the full mesh).
double norm_l2(const Mesh& mesh, const ScalarField& field, const SubdomainMask& mask);
// Same, for a field already restricted to mask-local values against a
// prebuilt masked mass matrix.
double norm_l2_masked(const SparseSymMatrix& mass_masked, const Vector& masked_values);

// H1 seminorm: element-wise gradient sums over triangles fully inside
// the mask.
double seminorm_h1(const Mesh& mesh, const ScalarField& field, const SubdomainMask& mask);

Vector restrict_to_mask(const SubdomainMask& mask, const Vector& full);

// Field files: magic "EPF1", version u32, n u32, then (n+1)^2 f64
// little-endian in row-major node order.
void save_field(const ScalarField& field, const std::string& path);
ScalarField load_field(const std::string& path);

}  // namespace epod

#endif  // EPOD_FEM_HPP
