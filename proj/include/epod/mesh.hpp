// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_MESH_HPP
#define EPOD_MESH_HPP

#include <array>
#include <vector>

namespace epod {

// Closed axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  double area() const { return (x1 - x0) * (y1 - y0); }
  bool is_full_domain() const {
    return x0 == 0.0 && x1 == 1.0 && y0 == 0.0 && y1 == 1.0;
  }
  bool operator==(const Rect&) const = default;
};

inline Rect full_domain() { return Rect{0.0, 1.0, 0.0, 1.0}; }

// Subdomain of interest D1 and source support D2 used throughout the
// experiment families.
inline Rect local_region() { return Rect{0.25, 0.75, 11.0 / 16.0, 15.0 / 16.0}; }
inline Rect source_region() { return Rect{0.25, 0.75, 1.0 / 16.0, 5.0 / 16.0}; }

// Uniform triangulation of the unit square: n subdivisions per side,
// grid step h = 1/n, every square split along the same diagonal
// (lower-left to upper-right). Node ids are row-major by y then x:
// node(i, j) = j*(n+1) + i at (i*h, j*h).
struct Mesh {
  int n = 0;
  double h = 0.0;
  std::vector<std::array<double, 2>> nodes;       // (n+1)^2 coordinates
  std::vector<std::array<int, 3>> triangles;      // 2 n^2 CCW triples
  std::vector<bool> boundary_mask;                // true on the Dirichlet boundary
  std::vector<int> interior_index;                // node id -> interior dof, -1 on boundary
  int interior_count = 0;                         // (n-1)^2

  int node_count() const { return static_cast<int>(nodes.size()); }
  int node_id(int i, int j) const { return j * (n + 1) + i; }
  double triangle_area() const { return 0.5 * h * h; }
};

// pre: n >= 2. Throws std::invalid_argument otherwise.
Mesh build_mesh(int n);

// Node ids of a mesh inside the closed rectangle, plus the inverse map.
// A triangle lies inside the mask iff all three vertices do; for
// grid-aligned rectangles those triangles tile the rectangle exactly.
struct SubdomainMask {
  Rect rect;
  std::vector<int> nodes;          // ascending node ids inside rect
  std::vector<int> local_of_node;  // node id -> local index, -1 outside

  int size() const { return static_cast<int>(nodes.size()); }
};

// Throws std::invalid_argument if no node falls inside the rectangle.
SubdomainMask resolve_mask(const Mesh& mesh, const Rect& rect);

}  // namespace epod

#endif  // EPOD_MESH_HPP
