// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace epod {

namespace {

constexpr double kRankTol = 1e-12;

// Applies the stored reflector of step k to a vector slice in place.
void apply_reflector(const Matrix& qr, const Vector& tau, Eigen::Index k, Vector& x) {
  const Eigen::Index m = qr.rows();
  double dot = x[k];
  for (Eigen::Index i = k + 1; i < m; ++i) dot += qr(i, k) * x[i];
  dot *= tau[k];
  x[k] -= dot;
  for (Eigen::Index i = k + 1; i < m; ++i) x[i] -= dot * qr(i, k);
}

}  // namespace

PivotedQr qr_pivoted(const Matrix& a, int max_steps) {
  PivotedQr f;
  f.rows = a.rows();
  f.cols = a.cols();
  f.qr = a;
  const Eigen::Index full = std::min(f.rows, f.cols);
  const Eigen::Index steps =
      max_steps < 0 ? full : std::min<Eigen::Index>(full, static_cast<Eigen::Index>(max_steps));
  f.tau = Vector::Zero(steps);
  f.permutation.resize(f.cols);
  std::iota(f.permutation.begin(), f.permutation.end(), 0);

  for (Eigen::Index k = 0; k < steps; ++k) {
    // Greedy pivot: the remaining column with the largest trailing norm.
    // Norms are recomputed exactly; the factored sizes here never make
    // the extra O(mn) per step matter.
    Eigen::Index pivot = k;
    double best = -1.0;
    for (Eigen::Index j = k; j < f.cols; ++j) {
      const double norm2 = f.qr.col(j).tail(f.rows - k).squaredNorm();
      if (norm2 > best) {
        best = norm2;
        pivot = j;
      }
    }
    if (pivot != k) {
      f.qr.col(k).swap(f.qr.col(pivot));
      std::swap(f.permutation[k], f.permutation[pivot]);
    }

    const double sigma = std::sqrt(std::max(best, 0.0));
    if (sigma == 0.0) break;  // remaining block is exactly zero

    const double alpha = f.qr(k, k);
    const double beta = alpha >= 0.0 ? -sigma : sigma;
    const double v0 = alpha - beta;
    f.tau[k] = (beta - alpha) / beta;
    f.qr(k, k) = beta;
    for (Eigen::Index i = k + 1; i < f.rows; ++i) f.qr(i, k) /= v0;

    for (Eigen::Index j = k + 1; j < f.cols; ++j) {
      double dot = f.qr(k, j);
      for (Eigen::Index i = k + 1; i < f.rows; ++i) dot += f.qr(i, k) * f.qr(i, j);
      dot *= f.tau[k];
      f.qr(k, j) -= dot;
      for (Eigen::Index i = k + 1; i < f.rows; ++i) f.qr(i, j) -= dot * f.qr(i, k);
    }
  }

  const double lead = steps > 0 ? std::abs(f.qr(0, 0)) : 0.0;
  f.rank = 0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    if (std::abs(f.qr(k, k)) < kRankTol * lead) break;
    ++f.rank;
  }
  return f;
}

Matrix PivotedQr::q() const {
  const Eigen::Index steps = tau.size();
  Matrix out = Matrix::Identity(rows, steps);
  for (Eigen::Index k = steps - 1; k >= 0; --k) {
    for (Eigen::Index j = 0; j < steps; ++j) {
      double dot = out(k, j);
      for (Eigen::Index i = k + 1; i < rows; ++i) dot += qr(i, k) * out(i, j);
      dot *= tau[k];
      out(k, j) -= dot;
      for (Eigen::Index i = k + 1; i < rows; ++i) out(i, j) -= dot * qr(i, k);
    }
  }
  return out;
}

Matrix PivotedQr::r() const {
  const Eigen::Index steps = tau.size();
  Matrix out = Matrix::Zero(steps, cols);
  for (Eigen::Index i = 0; i < steps; ++i)
    for (Eigen::Index j = i; j < cols; ++j) out(i, j) = qr(i, j);
  return out;
}

Vector ls_solve(const PivotedQr& f, const Vector& rhs) {
  if (rhs.size() != f.rows) throw std::invalid_argument("ls_solve: rhs size mismatch");
  if (f.rows < f.cols) throw std::invalid_argument("ls_solve: system must have rows >= cols");
  if (f.tau.size() < std::min(f.rows, f.cols))
    throw std::invalid_argument("ls_solve: factorization was truncated");
  if (f.rank == 0) throw std::runtime_error("ls_solve: matrix is numerically rank zero");

  Vector y = rhs;
  for (Eigen::Index k = 0; k < f.tau.size(); ++k) apply_reflector(f.qr, f.tau, k, y);

  Vector z = Vector::Zero(f.cols);
  for (Eigen::Index i = f.rank - 1; i >= 0; --i) {
    double s = y[i];
    for (Eigen::Index j = i + 1; j < f.rank; ++j) s -= f.qr(i, j) * z[j];
    z[i] = s / f.qr(i, i);
  }
  Vector x = Vector::Zero(f.cols);
  for (Eigen::Index j = 0; j < f.cols; ++j) x[f.permutation[j]] = z[j];
  return x;
}

Matrix ls_solve(const PivotedQr& f, const Matrix& rhs) {
  Matrix out(f.cols, rhs.cols());
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) out.col(j) = ls_solve(f, Vector(rhs.col(j)));
  return out;
}

SensorSet select_sensors(const PodBasis& basis, int m, int max_gram_dim) {
  const Eigen::Index j_count = basis.phi.rows();
  const int k = basis.k;
  if (k < 1) throw std::invalid_argument("select_sensors: basis is empty");
  if (m < k) throw std::invalid_argument("select_sensors: need at least K sensors");
  if (m > j_count) throw std::invalid_argument("select_sensors: more sensors than mask nodes");

  std::vector<int> picks;
  if (m == k) {
    const PivotedQr f = qr_pivoted(basis.phi.transpose(), m);
    picks.assign(f.permutation.begin(), f.permutation.begin() + m);
  } else {
    if (j_count > max_gram_dim)
      throw std::invalid_argument(
          "select_sensors: M > K pivots a " + std::to_string(j_count) + "^2 product; use M = K "
          "or a coarser mask");
    const Matrix gram = basis.phi * basis.phi.transpose();
    const PivotedQr f = qr_pivoted(gram, m);
    picks.assign(f.permutation.begin(), f.permutation.begin() + m);
  }

  SensorSet sensors;
  sensors.local_indices = picks;
  sensors.nodes.reserve(picks.size());
  for (int idx : picks) sensors.nodes.push_back(basis.nodes[idx]);
  sensors.b.resize(m, k);
  for (int i = 0; i < m; ++i) sensors.b.row(i) = basis.phi.row(picks[i]);
  return sensors;
}

Vector reconstruct_from_measurements(const PodBasis& basis, const SensorSet& sensors,
                                     const Vector& measurements) {
  if (measurements.size() != sensors.b.rows())
    throw std::invalid_argument("reconstruct_from_measurements: measurement count mismatch");
  const PivotedQr f = qr_pivoted(sensors.b);
  if (f.rank < basis.k)
    throw std::runtime_error("reconstruct_from_measurements: measurement matrix is rank deficient");
  return reconstruct(basis, ls_solve(f, measurements));
}

}  // namespace epod
