// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_MAPS_HPP
#define EPOD_MAPS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "epod/kdtree.hpp"
#include "epod/pod.hpp"
#include "epod/snapshots.hpp"
#include "epod/sparse.hpp"

namespace epod {

// Supervised pairs for the parameter-to-coefficient maps: row i holds the
// map input of snapshot i and its projection onto the basis.
struct TrainingTable {
  Matrix inputs;   // N1 x rt
  Matrix targets;  // N1 x K
};

TrainingTable build_training_table(const SnapshotSet& set, const Mesh& mesh,
                                   const PodBasis& basis);

// Evaluation result of any map. clamped marks queries outside the trusted
// input box; fallback marks a degenerate local fit replaced by
// inverse-distance weighting.
struct MapEval {
  Vector c;
  bool clamped = false;
  bool fallback = false;
};

// Tensor-product grid of map values with multilinear cell interpolation.
// Flat value index runs dimension 0 fastest.
struct GridMap {
  std::vector<Vector> axes;  // ascending nodes per dimension
  Matrix values;             // (prod axis sizes) x K
};

std::vector<Vector> uniform_axes(const Vector& lo, const Vector& hi, int nodes_per_dim);

// target(xi) evaluated at every tensor node. Dimension capped at 6; node
// counts must be >= 2 per axis.
GridMap build_grid_map(const std::vector<Vector>& axes,
                       const std::function<Vector(const Vector&)>& target);
MapEval eval_grid(const GridMap& map, const Vector& q);

// Least-squares fit in the total-degree Legendre space on [-1,1]^d after
// per-dimension affine rescaling from [lo, hi].
struct LegendreMap {
  int degree = 0;
  std::vector<std::vector<int>> alphas;  // multi-indices with |alpha|_1 <= degree
  Matrix coeffs;                         // alphas.size() x K
  Vector lo, hi;
};

// Graded lexicographic enumeration of {alpha : |alpha|_1 <= degree}; its
// size is C(dims + degree, degree).
std::vector<std::vector<int>> total_degree_multi_indices(int dims, int degree);

// Requires at least twice as many samples as basis functions; throws on a
// rank-deficient design matrix.
LegendreMap fit_legendre(const TrainingTable& table, int degree, const Vector& lo,
                         const Vector& hi);
MapEval eval_legendre(const LegendreMap& map, const Vector& q);

// Nearest-neighbor local linear fit: for the n nearest training inputs
// xi^m, solve  c^m ~ c(q) + (xi^m - q) . g  per output and return c(q).
// Needs n >= rt + 1 rows; degenerate neighbor geometry falls back to
// inverse-distance weighting with the fallback flag set.
struct KnnMap {
  TrainingTable table;
  int neighbors = 20;
  std::shared_ptr<const KdTree> tree;  // built over table.inputs
};

KnnMap build_knn_map(TrainingTable table, int neighbors);
MapEval eval_knn_ls(const KnnMap& map, const Vector& q);
MapEval eval_knn_ls(const KdTree& tree, const TrainingTable& table, const Vector& q,
                    int neighbors);

// Tagged union persisted as "PMAP" + kind.
enum class MapKind : std::uint32_t { grid = 0, legendre = 1, knn = 2 };

struct OnlineMap {
  MapKind kind = MapKind::grid;
  GridMap grid;
  LegendreMap legendre;
  KnnMap knn;

  MapEval eval(const Vector& q) const;
  int output_dim() const;
};

void save_map(const std::string& path, const OnlineMap& map);
OnlineMap load_map(const std::string& path);

}  // namespace epod

#endif  // EPOD_MAPS_HPP
