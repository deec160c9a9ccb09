// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/snapshots.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

#include "epod/binio.hpp"
#include "epod/fem.hpp"

namespace epod {

SnapshotSet generate_snapshots(const Mesh& mesh, const CoeffFamily& family,
                               const ForceFamily& force, std::uint64_t seed, int count,
                               double tol) {
  if (count < 1) throw std::invalid_argument("generate_snapshots: count must be >= 1");
  SnapshotSet set;
  set.n = mesh.n;
  set.nodes.resize(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) set.nodes[i] = i;
  set.params = sample_params(family, force, seed, count);
  set.fields.resize(mesh.node_count(), count);
  set.family = family.id;
  set.force = force.id;
  set.seed = seed;
  set.tol = tol;
  for (int k = 0; k < count; ++k) {
    try {
      set.fields.col(k) =
          solve_realization(mesh, coeff_fn(family, set.params[k]), force_fn(force, set.params[k]),
                            tol)
              .values;
    } catch (const std::exception& e) {
      throw std::runtime_error("snapshot " + std::to_string(k) + ": " + e.what());
    }
  }
  return set;
}

SnapshotSet restrict_snapshots(const SnapshotSet& set, const Mesh& mesh, const Rect& mask_rect) {
  const SubdomainMask mask = resolve_mask(mesh, mask_rect);
  SnapshotSet out;
  out.n = set.n;
  out.mask_rect = mask_rect;
  out.params = set.params;
  out.family = set.family;
  out.force = set.force;
  out.seed = set.seed;
  out.tol = set.tol;

  // Map global node ids into the current row set.
  std::vector<int> row_of_node(mesh.node_count(), -1);
  for (std::size_t r = 0; r < set.nodes.size(); ++r) row_of_node[set.nodes[r]] = static_cast<int>(r);

  out.nodes.reserve(mask.nodes.size());
  out.fields.resize(static_cast<Eigen::Index>(mask.nodes.size()), set.fields.cols());
  for (std::size_t j = 0; j < mask.nodes.size(); ++j) {
    const int row = row_of_node[mask.nodes[j]];
    if (row < 0)
      throw std::invalid_argument("restrict_snapshots: mask is not contained in the set's rows");
    out.nodes.push_back(mask.nodes[j]);
    out.fields.row(static_cast<Eigen::Index>(j)) = set.fields.row(row);
  }
  return out;
}

void save_snapshots(const std::string& path, const SnapshotSet& set) {
  if (!set.is_full())
    throw std::invalid_argument("save_snapshots: only full-domain sets are serialized");
  const std::uint64_t n_rows = static_cast<std::uint64_t>(set.fields.rows());
  const std::uint64_t n_cols = static_cast<std::uint64_t>(set.fields.cols());
  const std::uint64_t r = set.params.empty() ? 0 : static_cast<std::uint64_t>(set.params[0].xi.size());
  const std::uint64_t fpc =
      set.params.empty() ? 0 : static_cast<std::uint64_t>(set.params[0].theta.size());

  std::ofstream os = binio::open_out(path);
  binio::write_magic(os, "PODS");
  binio::write_le<std::uint32_t>(os, 1);
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(set.n));
  binio::write_le<std::uint64_t>(os, n_cols);
  binio::write_le<std::uint64_t>(os, r);
  binio::write_le<std::uint64_t>(os, fpc);
  for (const auto& pv : set.params) {
    for (Eigen::Index i = 0; i < pv.xi.size(); ++i) binio::write_le<double>(os, pv.xi[i]);
    for (Eigen::Index i = 0; i < pv.theta.size(); ++i) binio::write_le<double>(os, pv.theta[i]);
  }
  for (std::uint64_t c = 0; c < n_cols; ++c)
    for (std::uint64_t i = 0; i < n_rows; ++i)
      binio::write_le<double>(os, set.fields(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
  if (!os) throw std::runtime_error("save_snapshots: write failed: " + path);
}

SnapshotSet load_snapshots(const std::string& path) {
  std::ifstream is = binio::open_in(path);
  binio::expect_magic(is, "PODS", path);
  const auto version = binio::read_le<std::uint32_t>(is);
  if (version != 1)
    throw std::runtime_error("load_snapshots: unsupported version " + std::to_string(version));
  SnapshotSet set;
  set.n = static_cast<int>(binio::read_le<std::uint32_t>(is));
  const auto n_cols = binio::read_le<std::uint64_t>(is);
  const auto r = binio::read_le<std::uint64_t>(is);
  const auto fpc = binio::read_le<std::uint64_t>(is);
  const std::uint64_t n_rows =
      static_cast<std::uint64_t>(set.n + 1) * static_cast<std::uint64_t>(set.n + 1);

  set.nodes.resize(n_rows);
  for (std::uint64_t i = 0; i < n_rows; ++i) set.nodes[i] = static_cast<int>(i);
  set.params.resize(n_cols);
  for (auto& pv : set.params) {
    pv.xi.resize(static_cast<Eigen::Index>(r));
    for (std::uint64_t i = 0; i < r; ++i) pv.xi[static_cast<Eigen::Index>(i)] = binio::read_le<double>(is);
    pv.theta.resize(static_cast<Eigen::Index>(fpc));
    for (std::uint64_t i = 0; i < fpc; ++i)
      pv.theta[static_cast<Eigen::Index>(i)] = binio::read_le<double>(is);
  }
  set.fields.resize(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (std::uint64_t c = 0; c < n_cols; ++c)
    for (std::uint64_t i = 0; i < n_rows; ++i)
      set.fields(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = binio::read_le<double>(is);
  if (!is) throw std::runtime_error("load_snapshots: truncated file: " + path);
  return set;
}

}  // namespace epod
