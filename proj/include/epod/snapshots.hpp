// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_SNAPSHOTS_HPP
#define EPOD_SNAPSHOTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "epod/coeff.hpp"
#include "epod/mesh.hpp"
#include "epod/sparse.hpp"

namespace epod {

// A batch of FEM solution fields, one column per parameter draw. Rows are
// the nodes listed in `nodes`; a freshly generated set covers the full
// mesh and restricted views keep the global node ids so nested
// restrictions compose.
struct SnapshotSet {
  int n = 0;
  Rect mask_rect = full_domain();
  std::vector<int> nodes;
  std::vector<ParamVector> params;
  Matrix fields;  // nodes.size() x N

  Family family = Family::ex1;
  Force force = Force::trig_indicator_ex1;
  std::uint64_t seed = 0;
  double tol = 1e-10;

  int count() const { return static_cast<int>(fields.cols()); }
  bool is_full() const { return mask_rect.is_full_domain(); }
};

// N independent Dirichlet solves with parameters drawn from per-index
// streams of `seed`. Solver failures carry the snapshot index.
SnapshotSet generate_snapshots(const Mesh& mesh, const CoeffFamily& family,
                               const ForceFamily& force, std::uint64_t seed, int count,
                               double tol = 1e-10);

// Rows limited to the nodes of `mask_rect`. The rect must be contained in
// the set's current mask.
SnapshotSet restrict_snapshots(const SnapshotSet& set, const Mesh& mesh, const Rect& mask_rect);

// "PODS" container. Only full-domain sets are serialized; restrictions
// are cheap enough to redo on load.
void save_snapshots(const std::string& path, const SnapshotSet& set);
SnapshotSet load_snapshots(const std::string& path);

}  // namespace epod

#endif  // EPOD_SNAPSHOTS_HPP
