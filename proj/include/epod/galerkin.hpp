// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_GALERKIN_HPP
#define EPOD_GALERKIN_HPP

#include <functional>
#include <vector>

#include "epod/coeff.hpp"
#include "epod/mesh.hpp"
#include "epod/pod.hpp"
#include "epod/sparse.hpp"

namespace epod {

// Offline-precomputed K x K Galerkin blocks on a full-domain basis. For
// an affine family, a_red[t] = Phi^T A_t Phi per affine term with the
// matching scalar weights; f_red = Phi^T b when the force carries no
// parameters (otherwise it stays empty and the load is assembled per
// query).
struct ReducedSystem {
  PodBasis basis;
  Family family = Family::ex1;
  std::vector<Matrix> a_red;
  std::vector<std::function<double(const Vector&)>> weights;
  Vector f_red;
};

// Rejects bases on proper subdomains: Galerkin test functions must live
// on all of D. Non-affine families get only f_red.
ReducedSystem precompute_reduced(const PodBasis& basis, const CoeffFamily& family,
                                 const ForceFamily& force, const Mesh& mesh);

// Assembles sum_t w_t(xi) a_red[t] and solves by dense Cholesky. Throws
// when the assembled matrix is not positive definite (ellipticity
// violation) or when the system lacks affine blocks.
Vector online_solve(const ReducedSystem& system, const Vector& xi);

// General path: full stiffness assembly for this realization, then
// Phi^T A Phi c = Phi^T b. Works for every family; slower.
Vector online_solve_nonaffine(const PodBasis& basis, const CoeffFamily& family,
                              const ForceFamily& force, const ParamVector& params,
                              const Mesh& mesh);

// Phi c zero-extended over the full mesh (the basis is full-domain, so
// this is just Phi c).
Vector reduced_field(const PodBasis& basis, const Vector& c);

}  // namespace epod

#endif  // EPOD_GALERKIN_HPP
