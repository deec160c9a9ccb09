// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/galerkin.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

#include "epod/fem.hpp"

namespace epod {

namespace {

// Phi^T A Phi through sparse products; mirrored so Cholesky sees an
// exactly symmetric matrix. Basis columns vanish on the boundary, so the
// unconstrained stiffness gives the same block as the eliminated one.
Matrix reduced_block(const PodBasis& basis, const SparseSymMatrix& a) {
  Matrix block(basis.k, basis.k);
  for (int j = 0; j < basis.k; ++j) {
    const Vector w = a.apply(basis.phi.col(j));
    for (int i = 0; i < basis.k; ++i) block(i, j) = basis.phi.col(i).dot(w);
  }
  return 0.5 * (block + block.transpose());
}

void require_full_domain(const PodBasis& basis) {
  if (!basis.mask_rect.is_full_domain())
    throw std::invalid_argument("galerkin: basis must span the full domain, not a local mask");
}

Vector solve_spd(const Matrix& m, const Vector& rhs) {
  const Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("galerkin: reduced matrix is not positive definite");
  return llt.solve(rhs);
}

}  // namespace

ReducedSystem precompute_reduced(const PodBasis& basis, const CoeffFamily& family,
                                 const ForceFamily& force, const Mesh& mesh) {
  require_full_domain(basis);
  if (basis.n != mesh.n) throw std::invalid_argument("precompute_reduced: mesh mismatch");

  ReducedSystem system;
  system.basis = basis;
  system.family = family.id;
  if (is_affine(family.id)) {
    for (const AffineTerm& term : affine_terms(family)) {
      system.a_red.push_back(reduced_block(basis, assemble_stiffness(mesh, term.field)));
      system.weights.push_back(term.weight);
    }
  }
  if (force.param_count == 0) {
    ParamVector no_params;
    system.f_red =
        basis.phi.transpose() * assemble_load(mesh, force_fn(force, no_params));
  }
  return system;
}

Vector online_solve(const ReducedSystem& system, const Vector& xi) {
  if (system.a_red.empty())
    throw std::invalid_argument("online_solve: system has no affine blocks; use the non-affine path");
  if (system.f_red.size() != system.basis.k)
    throw std::invalid_argument("online_solve: system has no precomputed load");
  Matrix m = Matrix::Zero(system.basis.k, system.basis.k);
  for (std::size_t t = 0; t < system.a_red.size(); ++t)
    m += system.weights[t](xi) * system.a_red[t];
  return solve_spd(m, system.f_red);
}

Vector online_solve_nonaffine(const PodBasis& basis, const CoeffFamily& family,
                              const ForceFamily& force, const ParamVector& params,
                              const Mesh& mesh) {
  require_full_domain(basis);
  if (basis.n != mesh.n) throw std::invalid_argument("online_solve_nonaffine: mesh mismatch");
  const SparseSymMatrix a = assemble_stiffness(mesh, coeff_fn(family, params));
  const Vector b = assemble_load(mesh, force_fn(force, params));
  return solve_spd(reduced_block(basis, a), basis.phi.transpose() * b);
}

Vector reduced_field(const PodBasis& basis, const Vector& c) { return reconstruct(basis, c); }

}  // namespace epod
