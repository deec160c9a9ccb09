// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_SEPARABILITY_HPP
#define EPOD_SEPARABILITY_HPP

#include <vector>

#include "epod/fem.hpp"
#include "epod/mesh.hpp"
#include "epod/sparse.hpp"

namespace epod {

// Discrete Green's operator sampled between two disjoint subdomains:
// column j holds the solution values on the target nodes for a unit
// nodal load at source node j.
struct GreensBlock {
  Matrix g;  // target nodes x retained source nodes
  std::vector<int> target_nodes;
  std::vector<int> source_nodes;
};

// One Dirichlet solve per retained source node (every stride-th node of
// the source mask). The rectangles must be disjoint with positive
// separation.
GreensBlock greens_block(const Mesh& mesh, const ScalarFn& coefficient, const Rect& target,
                         const Rect& source, int source_stride, double tol = 1e-10);

// Singular values of the block, descending, via the eigenvalues of G^T G.
Vector singular_decay(const GreensBlock& block);

}  // namespace epod

#endif  // EPOD_SEPARABILITY_HPP
