// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/pod.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "epod/binio.hpp"
#include "epod/fem.hpp"

namespace epod {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

Spectrum eig_sym(const Matrix& input) {
  if (input.rows() != input.cols()) throw std::invalid_argument("eig_sym: matrix must be square");
  const Eigen::Index n = input.rows();
  const double scale = input.norm();
  if ((input - input.transpose()).norm() > 1e-10 * std::max(scale, 1.0))
    throw std::invalid_argument("eig_sym: matrix is not symmetric");

  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double target = 1e-12 * std::max(scale, 1e-300);

  const int max_sweeps = 64;
  int sweep = 0;
  while (off_diagonal_norm(a) >= target) {
    if (++sweep > max_sweeps) throw std::runtime_error("eig_sym: Jacobi sweeps did not converge");
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < target / (static_cast<double>(n))) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Classic two-sided rotation choosing the smaller angle root.
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double api = a(p, i);
          const double aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  Spectrum spec;
  spec.eigenvalues.resize(n);
  spec.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    spec.eigenvalues[j] = a(order[j], order[j]);
    spec.eigenvectors.col(j) = v.col(order[j]);
  }
  const double lead = spec.eigenvalues.size() ? std::abs(spec.eigenvalues[0]) : 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    if (spec.eigenvalues[j] < 0.0 && spec.eigenvalues[j] >= -1e-10 * lead) spec.eigenvalues[j] = 0.0;
  return spec;
}

Matrix correlation_matrix(const Matrix& fields, const SparseSymMatrix& mass) {
  if (fields.rows() != static_cast<Eigen::Index>(mass.dim()))
    throw std::invalid_argument("correlation_matrix: field rows do not match the mass matrix");
  const Eigen::Index count = fields.cols();
  Matrix mu(fields.rows(), count);
  for (Eigen::Index j = 0; j < count; ++j) mu.col(j) = mass.apply(fields.col(j));
  Matrix sigma(count, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    sigma(i, i) = fields.col(i).dot(mu.col(i));
    for (Eigen::Index j = i + 1; j < count; ++j) {
      const double value = fields.col(i).dot(mu.col(j));
      sigma(i, j) = value;
      sigma(j, i) = value;
    }
  }
  return sigma;
}

double energy_ratio(const Vector& eigenvalues, int k) {
  const double total = eigenvalues.sum();
  if (total <= 0.0) throw std::invalid_argument("energy_ratio: eigenvalue sum must be positive");
  double tail = 0.0;
  for (Eigen::Index j = k; j < eigenvalues.size(); ++j) tail += std::max(eigenvalues[j], 0.0);
  return 1.0 - std::sqrt(std::min(tail / total, 1.0));
}

PodBasis build_basis(const SnapshotSet& set, const Mesh& mesh, const Rect& mask_rect,
                     const Truncation& truncation, bool subtract_mean) {
  if (set.n != mesh.n) throw std::invalid_argument("build_basis: snapshot/mesh resolution mismatch");
  const SnapshotSet local =
      (set.mask_rect == mask_rect) ? set : restrict_snapshots(set, mesh, mask_rect);

  PodBasis basis;
  basis.n = mesh.n;
  basis.mask_rect = mask_rect;
  basis.nodes = local.nodes;
  basis.snapshot_count = local.count();
  basis.mass = assemble_mass(mesh, resolve_mask(mesh, mask_rect));

  Matrix fields = local.fields;
  if (subtract_mean) {
    const Vector mean = fields.rowwise().mean();
    fields.colwise() -= mean;
  }

  basis.spectrum = eig_sym(correlation_matrix(fields, basis.mass));
  const Vector& lambda = basis.spectrum.eigenvalues;
  if (lambda.size() == 0 || lambda[0] <= 0.0)
    throw std::invalid_argument("build_basis: snapshot set has no energy on this mask");

  int rank = 0;
  while (rank < lambda.size() && lambda[rank] > 1e-12 * lambda[0]) ++rank;

  int k = 0;
  switch (truncation.rule) {
    case Truncation::Rule::fixed_k:
      if (truncation.k < 0 || truncation.k > rank)
        throw std::invalid_argument("build_basis: requested K " + std::to_string(truncation.k) +
                                    " outside numerical rank " + std::to_string(rank));
      k = truncation.k;
      break;
    case Truncation::Rule::energy: {
      if (truncation.eta <= 0.0 || truncation.eta >= 1.0)
        throw std::invalid_argument("build_basis: energy threshold must be in (0,1)");
      k = rank;
      for (int j = 1; j <= rank; ++j) {
        if (energy_ratio(lambda, j) >= truncation.eta) {
          k = j;
          break;
        }
      }
      break;
    }
  }

  basis.k = k;
  basis.phi.resize(fields.rows(), k);
  for (int j = 0; j < k; ++j)
    basis.phi.col(j) = fields * basis.spectrum.eigenvectors.col(j) / std::sqrt(lambda[j]);
  basis.mphi.resize(fields.rows(), k);
  for (int j = 0; j < k; ++j) basis.mphi.col(j) = basis.mass.apply(basis.phi.col(j));
  return basis;
}

Vector project(const PodBasis& basis, const Vector& field_on_mask) {
  if (field_on_mask.size() != basis.phi.rows())
    throw std::invalid_argument("project: field size does not match the basis mask");
  return basis.mphi.transpose() * field_on_mask;
}

Vector reconstruct(const PodBasis& basis, const Vector& coefficients) {
  if (coefficients.size() != basis.k)
    throw std::invalid_argument("reconstruct: coefficient count does not match K");
  return basis.phi * coefficients;
}

double mass_norm_sq(const PodBasis& basis, const Vector& field_on_mask) {
  if (field_on_mask.size() != basis.phi.rows())
    throw std::invalid_argument("mass_norm_sq: field size does not match the basis mask");
  return field_on_mask.dot(basis.mass.apply(field_on_mask));
}

std::pair<double, double> pod_error_identity(const SnapshotSet& set, const Mesh& mesh,
                                             const PodBasis& basis) {
  const SnapshotSet local =
      (set.mask_rect == basis.mask_rect) ? set : restrict_snapshots(set, mesh, basis.mask_rect);
  if (local.count() != basis.snapshot_count)
    throw std::invalid_argument("pod_error_identity: basis was built from a different set size");

  double err = 0.0;
  double total = 0.0;
  for (int i = 0; i < local.count(); ++i) {
    const Vector u = local.fields.col(i);
    const Vector residual = u - reconstruct(basis, project(basis, u));
    err += mass_norm_sq(basis, residual);
    total += mass_norm_sq(basis, u);
  }
  if (total <= 0.0) throw std::invalid_argument("pod_error_identity: snapshots vanish on the mask");

  const Vector& lambda = basis.spectrum.eigenvalues;
  double tail = 0.0;
  for (Eigen::Index s = basis.k; s < lambda.size(); ++s) tail += std::max(lambda[s], 0.0);
  return {err / total, tail / lambda.sum()};
}

void save_basis(const std::string& path, const PodBasis& basis) {
  std::ofstream os = binio::open_out(path);
  binio::write_magic(os, "PODB");
  binio::write_le<std::uint32_t>(os, 1);
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(basis.n));
  binio::write_le<double>(os, basis.mask_rect.x0);
  binio::write_le<double>(os, basis.mask_rect.x1);
  binio::write_le<double>(os, basis.mask_rect.y0);
  binio::write_le<double>(os, basis.mask_rect.y1);
  binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(basis.k));
  binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(basis.snapshot_count));
  for (Eigen::Index j = 0; j < basis.spectrum.eigenvalues.size(); ++j)
    binio::write_le<double>(os, basis.spectrum.eigenvalues[j]);
  for (Eigen::Index j = 0; j < basis.phi.cols(); ++j)
    for (Eigen::Index i = 0; i < basis.phi.rows(); ++i) binio::write_le<double>(os, basis.phi(i, j));
  if (!os) throw std::runtime_error("save_basis: write failed: " + path);
}

PodBasis load_basis(const std::string& path) {
  std::ifstream is = binio::open_in(path);
  binio::expect_magic(is, "PODB", path);
  const auto version = binio::read_le<std::uint32_t>(is);
  if (version != 1)
    throw std::runtime_error("load_basis: unsupported version " + std::to_string(version));

  PodBasis basis;
  basis.n = static_cast<int>(binio::read_le<std::uint32_t>(is));
  basis.mask_rect.x0 = binio::read_le<double>(is);
  basis.mask_rect.x1 = binio::read_le<double>(is);
  basis.mask_rect.y0 = binio::read_le<double>(is);
  basis.mask_rect.y1 = binio::read_le<double>(is);
  basis.k = static_cast<int>(binio::read_le<std::uint64_t>(is));
  basis.snapshot_count = static_cast<int>(binio::read_le<std::uint64_t>(is));
  basis.spectrum.eigenvalues.resize(basis.snapshot_count);
  for (int j = 0; j < basis.snapshot_count; ++j)
    basis.spectrum.eigenvalues[j] = binio::read_le<double>(is);

  const Mesh mesh = build_mesh(basis.n);
  const SubdomainMask mask = resolve_mask(mesh, basis.mask_rect);
  basis.nodes = mask.nodes;
  basis.mass = assemble_mass(mesh, mask);
  basis.phi.resize(static_cast<Eigen::Index>(mask.size()), basis.k);
  for (int j = 0; j < basis.k; ++j)
    for (Eigen::Index i = 0; i < basis.phi.rows(); ++i) basis.phi(i, j) = binio::read_le<double>(is);
  if (!is) throw std::runtime_error("load_basis: truncated file: " + path);
  basis.mphi.resize(basis.phi.rows(), basis.k);
  for (int j = 0; j < basis.k; ++j) basis.mphi.col(j) = basis.mass.apply(basis.phi.col(j));
  return basis;
}

}  // namespace epod
