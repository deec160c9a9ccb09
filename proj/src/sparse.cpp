// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/sparse.hpp"

#include <cmath>
#include <stdexcept>

namespace epod {

double SparseSymMatrix::symmetry_defect() const {
  double max_entry = 0.0;
  double max_diff = 0.0;
  for (int row = 0; row < m.outerSize(); ++row) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, row); it; ++it) {
      max_entry = std::max(max_entry, std::abs(it.value()));
      max_diff = std::max(max_diff, std::abs(it.value() - m.coeff(it.col(), it.row())));
    }
  }
  return max_entry > 0.0 ? max_diff / max_entry : 0.0;
}

SparseSymMatrix from_triplets(int dim, const std::vector<Eigen::Triplet<double>>& triplets) {
  SparseSymMatrix a;
  a.m.resize(dim, dim);
  a.m.setFromTriplets(triplets.begin(), triplets.end());
  a.m.makeCompressed();
  return a;
}

PcgResult pcg_solve(const SparseSymMatrix& a, const Vector& b, double tol, int max_iterations,
                    const std::function<void(int, const Vector&)>& trace) {
  if (tol <= 0.0) throw std::invalid_argument("pcg_solve: tol must be positive");
  if (a.dim() != b.size()) throw std::invalid_argument("pcg_solve: dimension mismatch");

  PcgResult result;
  const double b_norm = b.norm();
  result.x = Vector::Zero(b.size());
  if (b_norm == 0.0) {
    result.converged = true;
    return result;
  }

  if (max_iterations <= 0) {
    const double budget = 20.0 * std::sqrt(static_cast<double>(a.dim())) * std::log(1.0 / tol);
    max_iterations = static_cast<int>(std::min(budget, 5.0e5));
    max_iterations = std::max(max_iterations, 50);
  }

  const Vector inv_diag = a.diagonal().cwiseInverse();

  Vector r = b;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);

  for (int k = 0; k < max_iterations; ++k) {
    const Vector ap = a.apply(p);
    const double alpha = rz / p.dot(ap);
    result.x += alpha * p;
    r -= alpha * ap;
    result.iterations = k + 1;
    if (trace) trace(k + 1, result.x);

    result.relative_residual = r.norm() / b_norm;
    if (result.relative_residual <= tol) {
      // The recurrence residual drifts below the attainable level in
      // finite precision; accept only a verified true residual and
      // otherwise restart the recurrence from it.
      r = b - a.apply(result.x);
      result.relative_residual = r.norm() / b_norm;
      if (result.relative_residual <= tol) {
        result.converged = true;
        return result;
      }
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
      continue;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  result.relative_residual = (b - a.apply(result.x)).norm() / b_norm;
  return result;
}

}  // namespace epod
