// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/mesh.hpp"

#include <stdexcept>
#include <string>

namespace epod {

Mesh build_mesh(int n) {
  if (n < 2) throw std::invalid_argument("build_mesh: n must be >= 2, got " + std::to_string(n));

  Mesh mesh;
  mesh.n = n;
  mesh.h = 1.0 / n;

  const int side = n + 1;
  mesh.nodes.resize(static_cast<std::size_t>(side) * side);
  mesh.boundary_mask.resize(mesh.nodes.size());
  mesh.interior_index.assign(mesh.nodes.size(), -1);

  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      const int id = mesh.node_id(i, j);
      mesh.nodes[id] = {i * mesh.h, j * mesh.h};
      const bool on_boundary = (i == 0 || i == n || j == 0 || j == n);
      mesh.boundary_mask[id] = on_boundary;
      if (!on_boundary) mesh.interior_index[id] = mesh.interior_count++;
    }
  }

  mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = mesh.node_id(i, j);
      const int v10 = mesh.node_id(i + 1, j);
      const int v01 = mesh.node_id(i, j + 1);
      const int v11 = mesh.node_id(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  return mesh;
}

SubdomainMask resolve_mask(const Mesh& mesh, const Rect& rect) {
  SubdomainMask mask;
  mask.rect = rect;
  mask.local_of_node.assign(mesh.nodes.size(), -1);
  for (int id = 0; id < mesh.node_count(); ++id) {
    const auto& p = mesh.nodes[id];
    if (rect.contains(p[0], p[1])) {
      mask.local_of_node[id] = static_cast<int>(mask.nodes.size());
      mask.nodes.push_back(id);
    }
  }
  if (mask.nodes.empty())
    throw std::invalid_argument("resolve_mask: rectangle contains no mesh node");
  return mask;
}

}  // namespace epod
