// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_POD_HPP
#define EPOD_POD_HPP

#include <string>
#include <utility>
#include <vector>

#include "epod/mesh.hpp"
#include "epod/snapshots.hpp"
#include "epod/sparse.hpp"

namespace epod {

// Eigenpairs of a symmetric matrix, sorted by non-increasing eigenvalue.
// Eigenvalues in [-1e-10 * lambda_1, 0) are clamped to 0.
struct Spectrum {
  Vector eigenvalues;
  Matrix eigenvectors;  // column j pairs with eigenvalues[j]
};

// Cyclic Jacobi rotations, swept until every off-diagonal entry is below
// 1e-12 * ||A||_F. Throws std::invalid_argument on non-symmetric input.
Spectrum eig_sym(const Matrix& a);

// sigma_ij = u_i^T M u_j, mirrored so the result is exactly symmetric.
Matrix correlation_matrix(const Matrix& fields, const SparseSymMatrix& mass);

// 1 - sqrt(sum_{j>k} lambda_j / sum_j lambda_j), the captured-energy
// quantity plotted against basis size.
double energy_ratio(const Vector& eigenvalues, int k);

struct Truncation {
  enum class Rule { fixed_k, energy };
  Rule rule = Rule::fixed_k;
  int k = 0;
  double eta = 0.9999;

  static Truncation fixed(int k) { return {Rule::fixed_k, k, 0.0}; }
  static Truncation energy(double eta) { return {Rule::energy, 0, eta}; }
};

// Reduced basis on a subdomain mask. phi is mass-orthonormal in the inner
// product of `mass` (assembled over triangles fully inside the mask);
// mphi caches mass * phi for fast projection.
struct PodBasis {
  int n = 0;
  Rect mask_rect = full_domain();
  std::vector<int> nodes;
  int k = 0;
  int snapshot_count = 0;
  Matrix phi;   // J x K
  Matrix mphi;  // J x K
  Spectrum spectrum;
  SparseSymMatrix mass;  // J x J masked mass matrix
};

// Basis from the snapshot correlation spectrum: phi_j =
// lambda_j^{-1/2} sum_i V_ij u_i. Eigenvalues below 1e-12 * lambda_1 are
// outside the numerical rank; a fixed-K request beyond it throws.
// subtract_mean builds the basis from snapshot fluctuations instead.
PodBasis build_basis(const SnapshotSet& set, const Mesh& mesh, const Rect& mask_rect,
                     const Truncation& truncation, bool subtract_mean = false);

// c_j = <u, phi_j>_M for a field given on the basis mask.
Vector project(const PodBasis& basis, const Vector& field_on_mask);
// Phi c.
Vector reconstruct(const PodBasis& basis, const Vector& coefficients);
// u^T M u on the mask.
double mass_norm_sq(const PodBasis& basis, const Vector& field_on_mask);

// Both sides of the projection-error identity:
//   sum_i ||u_i - P_K u_i||^2 / sum_i ||u_i||^2  =  sum_{s>K} lambda_s / sum_s lambda_s.
// The set must be the one the basis was built from.
std::pair<double, double> pod_error_identity(const SnapshotSet& set, const Mesh& mesh,
                                             const PodBasis& basis);

// "PODB" container; nodes, mass and mphi are rebuilt from (n, mask_rect)
// on load.
void save_basis(const std::string& path, const PodBasis& basis);
PodBasis load_basis(const std::string& path);

}  // namespace epod

#endif  // EPOD_POD_HPP
