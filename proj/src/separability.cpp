// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/separability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epod/pod.hpp"

namespace epod {

namespace {

bool rects_separated(const Rect& a, const Rect& b) {
  const bool x_overlap = a.x0 <= b.x1 && b.x0 <= a.x1;
  const bool y_overlap = a.y0 <= b.y1 && b.y0 <= a.y1;
  return !(x_overlap && y_overlap);
}

}  // namespace

GreensBlock greens_block(const Mesh& mesh, const ScalarFn& coefficient, const Rect& target,
                         const Rect& source, int source_stride, double tol) {
  if (source_stride < 1) throw std::invalid_argument("greens_block: stride must be >= 1");
  if (!rects_separated(target, source))
    throw std::invalid_argument("greens_block: target and source rectangles must be disjoint");

  const SubdomainMask target_mask = resolve_mask(mesh, target);
  const SubdomainMask source_mask = resolve_mask(mesh, source);

  GreensBlock block;
  block.target_nodes = target_mask.nodes;
  for (std::size_t j = 0; j < source_mask.nodes.size(); j += source_stride)
    block.source_nodes.push_back(source_mask.nodes[j]);

  const SparseSymMatrix a = eliminate_dirichlet(mesh, assemble_stiffness(mesh, coefficient));
  block.g.resize(static_cast<Eigen::Index>(block.target_nodes.size()),
                 static_cast<Eigen::Index>(block.source_nodes.size()));
  Vector load = Vector::Zero(mesh.node_count());
  for (std::size_t j = 0; j < block.source_nodes.size(); ++j) {
    load[block.source_nodes[j]] = 1.0;
    const ScalarField u = solve_dirichlet(mesh, a, load, tol);
    load[block.source_nodes[j]] = 0.0;
    for (std::size_t i = 0; i < block.target_nodes.size(); ++i)
      block.g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          u.values[block.target_nodes[i]];
  }
  return block;
}

Vector singular_decay(const GreensBlock& block) {
  const Matrix gram = block.g.transpose() * block.g;
  const Spectrum spec = eig_sym(0.5 * (gram + gram.transpose()));
  Vector sigma(spec.eigenvalues.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    sigma[i] = std::sqrt(std::max(spec.eigenvalues[i], 0.0));
  return sigma;
}

}  // namespace epod
