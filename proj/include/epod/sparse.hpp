// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_SPARSE_HPP
#define EPOD_SPARSE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

namespace epod {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Row-compressed symmetric matrix. Stiffness and mass matrices are built
// once from triplets and immutable afterwards, so shared use by concurrent
// readers is safe.
struct SparseSymMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> m;

  int dim() const { return static_cast<int>(m.rows()); }
  Vector apply(const Vector& x) const { return m * x; }
  Vector diagonal() const { return m.diagonal(); }
  double coeff(int i, int j) const { return m.coeff(i, j); }

  // Max |A - A^T| entry relative to the largest entry magnitude.
  double symmetry_defect() const;
};

SparseSymMatrix from_triplets(int dim, const std::vector<Eigen::Triplet<double>>& triplets);

struct PcgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Preconditioned conjugate gradients with the diagonal (Jacobi)
// preconditioner. Stops when ||b - Ax|| <= tol * ||b||; b = 0 returns
// x = 0 immediately. max_iterations <= 0 selects the default budget
// 20 * sqrt(dim) * ln(1/tol), capped at 500000.
//
// `trace`, when set, receives every iterate (index, x_k); used by
// property tests for the energy-norm monotonicity of the error.
PcgResult pcg_solve(const SparseSymMatrix& a, const Vector& b, double tol,
                    int max_iterations = -1,
                    const std::function<void(int, const Vector&)>& trace = nullptr);

}  // namespace epod

#endif  // EPOD_SPARSE_HPP
