// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/fem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "epod/binio.hpp"

namespace epod {

namespace {

struct TriangleGeometry {
  double area;
  // Constant P1 shape-function gradients, one column per vertex.
  Eigen::Matrix<double, 2, 3> grad;
};

TriangleGeometry triangle_geometry(const std::array<double, 2>& p0,
                                   const std::array<double, 2>& p1,
                                   const std::array<double, 2>& p2) {
  const double bx[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
  const double cx[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
  const double twice_area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  TriangleGeometry geo;
  geo.area = 0.5 * twice_area;
  for (int k = 0; k < 3; ++k) {
    geo.grad(0, k) = bx[k] / twice_area;
    geo.grad(1, k) = cx[k] / twice_area;
  }
  return geo;
}

}  // namespace

Eigen::Matrix3d local_stiffness(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                                const std::array<double, 2>& p2, double coefficient) {
  const TriangleGeometry geo = triangle_geometry(p0, p1, p2);
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      k(i, j) = coefficient * geo.area * geo.grad.col(i).dot(geo.grad.col(j));
  return k;
}

Eigen::Matrix3d local_mass(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                           const std::array<double, 2>& p2) {
  const TriangleGeometry geo = triangle_geometry(p0, p1, p2);
  Eigen::Matrix3d m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return (geo.area / 12.0) * m;
}

SparseSymMatrix assemble_stiffness(const Mesh& mesh, const ScalarFn& a_eval) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.triangles.size() * 9);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& p0 = mesh.nodes[tri[0]];
    const auto& p1 = mesh.nodes[tri[1]];
    const auto& p2 = mesh.nodes[tri[2]];
    const double cx = (p0[0] + p1[0] + p2[0]) / 3.0;
    const double cy = (p0[1] + p1[1] + p2[1]) / 3.0;
    const double a_value = a_eval(cx, cy);
    if (!(a_value > 0.0) || !std::isfinite(a_value)) {
      std::ostringstream msg;
      msg << "assemble_stiffness: contrast violation, coefficient " << a_value
          << " at triangle " << t << " centroid (" << cx << ", " << cy << ")";
      throw std::domain_error(msg.str());
    }
    const Eigen::Matrix3d k = local_stiffness(p0, p1, p2, a_value);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], k(i, j));
  }
  return from_triplets(mesh.node_count(), triplets);
}

SparseSymMatrix assemble_mass(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.triangles.size() * 9);
  for (const auto& tri : mesh.triangles) {
    const Eigen::Matrix3d m = local_mass(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], m(i, j));
  }
  return from_triplets(mesh.node_count(), triplets);
}

SparseSymMatrix assemble_mass(const Mesh& mesh, const SubdomainMask& mask) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& tri : mesh.triangles) {
    const int l0 = mask.local_of_node[tri[0]];
    const int l1 = mask.local_of_node[tri[1]];
    const int l2 = mask.local_of_node[tri[2]];
    if (l0 < 0 || l1 < 0 || l2 < 0) continue;
    const int local[3] = {l0, l1, l2};
    const Eigen::Matrix3d m = local_mass(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) triplets.emplace_back(local[i], local[j], m(i, j));
  }
  return from_triplets(mask.size(), triplets);
}

Vector assemble_load(const Mesh& mesh, const ScalarFn& f_eval) {
  Vector b = Vector::Zero(mesh.node_count());
  for (const auto& tri : mesh.triangles) {
    const auto& p0 = mesh.nodes[tri[0]];
    const auto& p1 = mesh.nodes[tri[1]];
    const auto& p2 = mesh.nodes[tri[2]];
    const double cx = (p0[0] + p1[0] + p2[0]) / 3.0;
    const double cy = (p0[1] + p1[1] + p2[1]) / 3.0;
    const double contribution = f_eval(cx, cy) * mesh.triangle_area() / 3.0;
    for (int k = 0; k < 3; ++k) b[tri[k]] += contribution;
  }
  return b;
}

SparseSymMatrix eliminate_dirichlet(const Mesh& mesh, const SparseSymMatrix& a) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(a.m.nonZeros());
  for (int row = 0; row < a.m.outerSize(); ++row) {
    const int ri = mesh.interior_index[row];
    if (ri < 0) continue;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a.m, row); it; ++it) {
      const int ci = mesh.interior_index[it.col()];
      if (ci >= 0) triplets.emplace_back(ri, ci, it.value());
    }
  }
  return from_triplets(mesh.interior_count, triplets);
}

Vector restrict_interior(const Mesh& mesh, const Vector& full) {
  Vector interior(mesh.interior_count);
  for (int id = 0; id < mesh.node_count(); ++id)
    if (mesh.interior_index[id] >= 0) interior[mesh.interior_index[id]] = full[id];
  return interior;
}

ScalarField extend_with_zeros(const Mesh& mesh, const Vector& interior) {
  ScalarField field;
  field.n = mesh.n;
  field.values = Vector::Zero(mesh.node_count());
  for (int id = 0; id < mesh.node_count(); ++id)
    if (mesh.interior_index[id] >= 0) field.values[id] = interior[mesh.interior_index[id]];
  return field;
}

ScalarField solve_dirichlet(const Mesh& mesh, const SparseSymMatrix& a_interior,
                            const Vector& load_full, double tol) {
  const Vector b = restrict_interior(mesh, load_full);
  const PcgResult result = pcg_solve(a_interior, b, tol);
  if (!result.converged) {
    std::ostringstream msg;
    msg << "solve_dirichlet: PCG did not converge in " << result.iterations
        << " iterations, relative residual " << result.relative_residual << " > tol " << tol;
    throw std::runtime_error(msg.str());
  }
  return extend_with_zeros(mesh, result.x);
}

ScalarField solve_realization(const Mesh& mesh, const ScalarFn& a_eval, const ScalarFn& f_eval,
                              double tol) {
  const SparseSymMatrix a = assemble_stiffness(mesh, a_eval);
  const SparseSymMatrix a_int = eliminate_dirichlet(mesh, a);
  const Vector b = assemble_load(mesh, f_eval);
  return solve_dirichlet(mesh, a_int, b, tol);
}

Vector restrict_to_mask(const SubdomainMask& mask, const Vector& full) {
  Vector out(mask.size());
  for (int k = 0; k < mask.size(); ++k) out[k] = full[mask.nodes[k]];
  return out;
}

double norm_l2(const Mesh& mesh, const ScalarField& field, const SubdomainMask& mask) {
  const SparseSymMatrix m = assemble_mass(mesh, mask);
  return norm_l2_masked(m, restrict_to_mask(mask, field.values));
}

double norm_l2_masked(const SparseSymMatrix& mass_masked, const Vector& masked_values) {
  if (mass_masked.dim() != masked_values.size())
    throw std::invalid_argument("norm_l2_masked: dimension mismatch");
  const double quad = masked_values.dot(mass_masked.apply(masked_values));
  return std::sqrt(std::max(quad, 0.0));
}

double seminorm_h1(const Mesh& mesh, const ScalarField& field, const SubdomainMask& mask) {
  double acc = 0.0;
  for (const auto& tri : mesh.triangles) {
    if (mask.local_of_node[tri[0]] < 0 || mask.local_of_node[tri[1]] < 0 ||
        mask.local_of_node[tri[2]] < 0)
      continue;
    const TriangleGeometry geo =
        triangle_geometry(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    for (int k = 0; k < 3; ++k) grad += field.values[tri[k]] * geo.grad.col(k);
    acc += geo.area * grad.squaredNorm();
  }
  return std::sqrt(acc);
}

namespace {
constexpr char kFieldMagic[4] = {'E', 'P', 'F', '1'};
constexpr std::uint32_t kFieldVersion = 1;
}  // namespace

void save_field(const ScalarField& field, const std::string& path) {
  auto os = binio::open_out(path);
  binio::write_magic(os, kFieldMagic);
  binio::write_le<std::uint32_t>(os, kFieldVersion);
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(field.n));
  for (Eigen::Index i = 0; i < field.values.size(); ++i)
    binio::write_le<double>(os, field.values[i]);
  if (!os) throw std::runtime_error("save_field: write failed: " + path);
}

ScalarField load_field(const std::string& path) {
  auto is = binio::open_in(path);
  binio::expect_magic(is, kFieldMagic, "load_field");
  const auto version = binio::read_le<std::uint32_t>(is);
  if (version != kFieldVersion)
    throw std::runtime_error("load_field: unsupported version " + std::to_string(version));
  ScalarField field;
  field.n = static_cast<int>(binio::read_le<std::uint32_t>(is));
  const int count = (field.n + 1) * (field.n + 1);
  field.values.resize(count);
  for (int i = 0; i < count; ++i) field.values[i] = binio::read_le<double>(is);
  return field;
}

}  // namespace epod
