// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_SENSING_HPP
#define EPOD_SENSING_HPP

#include <vector>

#include "epod/pod.hpp"
#include "epod/sparse.hpp"

namespace epod {

// Householder QR with greedy column pivoting (largest remaining column
// norm first). Numerical rank counts diagonal entries with
// |R_kk| >= 1e-12 * |R_11|.
struct PivotedQr {
  Matrix qr;                   // packed: R in the upper triangle, reflectors below
  Vector tau;                  // Householder scalars
  std::vector<int> permutation;  // column j of Q*R is column permutation[j] of A
  int rank = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Matrix q() const;  // thin Q, rows x min(rows, cols)
  Matrix r() const;  // min(rows, cols) x cols upper triangle
};

// max_steps < 0 factors all columns; a smaller budget stops after that
// many pivots (enough when only leading pivot indices are needed).
PivotedQr qr_pivoted(const Matrix& a, int max_steps = -1);

// Minimum-residual least squares via the pivoted factorization. Columns
// beyond the numerical rank get zero weight. Throws when rank is 0.
Vector ls_solve(const PivotedQr& qr, const Vector& rhs);
Matrix ls_solve(const PivotedQr& qr, const Matrix& rhs);

// Measurement design: M sensor rows of the basis.
struct SensorSet {
  std::vector<int> local_indices;  // positions within the basis mask node list
  std::vector<int> nodes;          // global mesh node ids
  Matrix b;                        // M x K rows of phi at the sensors
};

// M = K pivots the columns of phi^T, M > K the columns of phi phi^T; the
// first M pivot indices are the sensor locations. The M > K rule forms a
// J x J product, refused above max_gram_dim nodes.
SensorSet select_sensors(const PodBasis& basis, int m, int max_gram_dim = 4096);

// Least-squares coefficients of B c = y, expanded through the basis.
Vector reconstruct_from_measurements(const PodBasis& basis, const SensorSet& sensors,
                                     const Vector& measurements);

}  // namespace epod

#endif  // EPOD_SENSING_HPP
