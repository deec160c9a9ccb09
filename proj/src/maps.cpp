// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/maps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "epod/binio.hpp"
#include "epod/sensing.hpp"

namespace epod {

namespace {

// P_0..P_degree at t by the three-term recurrence.
void legendre_row(double t, int degree, std::vector<double>& out) {
  out.resize(degree + 1);
  out[0] = 1.0;
  if (degree >= 1) out[1] = t;
  for (int k = 1; k < degree; ++k)
    out[k + 1] = ((2.0 * k + 1.0) * t * out[k] - k * out[k - 1]) / (k + 1.0);
}

void enumerate_alphas(int dims, int budget, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == dims) {
    out.push_back(current);
    return;
  }
  for (int v = 0; v <= budget; ++v) {
    current.push_back(v);
    enumerate_alphas(dims, budget - v, current, out);
    current.pop_back();
  }
}

std::uint64_t grid_size(const std::vector<Vector>& axes) {
  std::uint64_t total = 1;
  for (const auto& axis : axes) total *= static_cast<std::uint64_t>(axis.size());
  return total;
}

}  // namespace

TrainingTable build_training_table(const SnapshotSet& set, const Mesh& mesh,
                                   const PodBasis& basis) {
  const SnapshotSet local = (set.mask_rect == basis.mask_rect)
                                ? set
                                : restrict_snapshots(set, mesh, basis.mask_rect);
  if (local.nodes != basis.nodes)
    throw std::invalid_argument("build_training_table: snapshot mask does not match the basis");

  TrainingTable table;
  const Vector probe = local.params.empty() ? Vector() : local.params[0].map_input();
  table.inputs.resize(local.count(), probe.size());
  table.targets.resize(local.count(), basis.k);
  for (int i = 0; i < local.count(); ++i) {
    table.inputs.row(i) = local.params[i].map_input().transpose();
    table.targets.row(i) = project(basis, local.fields.col(i)).transpose();
  }
  return table;
}

std::vector<Vector> uniform_axes(const Vector& lo, const Vector& hi, int nodes_per_dim) {
  if (nodes_per_dim < 2) throw std::invalid_argument("uniform_axes: need >= 2 nodes per dim");
  if (lo.size() != hi.size()) throw std::invalid_argument("uniform_axes: bound size mismatch");
  std::vector<Vector> axes(lo.size());
  for (Eigen::Index d = 0; d < lo.size(); ++d) {
    if (!(lo[d] < hi[d])) throw std::invalid_argument("uniform_axes: empty range");
    axes[d] = Vector::LinSpaced(nodes_per_dim, lo[d], hi[d]);
  }
  return axes;
}

GridMap build_grid_map(const std::vector<Vector>& axes,
                       const std::function<Vector(const Vector&)>& target) {
  if (axes.empty() || axes.size() > 6)
    throw std::invalid_argument("build_grid_map: dimension must be in [1, 6]");
  for (const auto& axis : axes) {
    if (axis.size() < 2) throw std::invalid_argument("build_grid_map: axis needs >= 2 nodes");
    for (Eigen::Index i = 1; i < axis.size(); ++i)
      if (!(axis[i] > axis[i - 1]))
        throw std::invalid_argument("build_grid_map: axis nodes must be strictly ascending");
  }

  GridMap map;
  map.axes = axes;
  const std::uint64_t total = grid_size(axes);
  const int dims = static_cast<int>(axes.size());
  Vector point(dims);
  for (std::uint64_t flat = 0; flat < total; ++flat) {
    std::uint64_t rest = flat;
    for (int d = 0; d < dims; ++d) {
      const std::uint64_t len = static_cast<std::uint64_t>(axes[d].size());
      point[d] = axes[d][static_cast<Eigen::Index>(rest % len)];
      rest /= len;
    }
    const Vector value = target(point);
    if (flat == 0) map.values.resize(static_cast<Eigen::Index>(total), value.size());
    map.values.row(static_cast<Eigen::Index>(flat)) = value.transpose();
  }
  return map;
}

MapEval eval_grid(const GridMap& map, const Vector& q) {
  const int dims = static_cast<int>(map.axes.size());
  if (q.size() != dims) throw std::invalid_argument("eval_grid: query dimension mismatch");

  MapEval result;
  std::vector<int> cell(dims);
  std::vector<double> weight(dims);
  for (int d = 0; d < dims; ++d) {
    const Vector& axis = map.axes[d];
    double x = q[d];
    if (x < axis[0]) {
      x = axis[0];
      result.clamped = true;
    } else if (x > axis[axis.size() - 1]) {
      x = axis[axis.size() - 1];
      result.clamped = true;
    }
    // Containing cell [i, i+1] with i in [0, len-2].
    int i = static_cast<int>(
                std::upper_bound(axis.data(), axis.data() + axis.size(), x) - axis.data()) -
            1;
    i = std::clamp(i, 0, static_cast<int>(axis.size()) - 2);
    cell[d] = i;
    weight[d] = (x - axis[i]) / (axis[i + 1] - axis[i]);
  }

  result.c = Vector::Zero(map.values.cols());
  for (int corner = 0; corner < (1 << dims); ++corner) {
    double w = 1.0;
    std::uint64_t flat = 0;
    std::uint64_t stride = 1;
    for (int d = 0; d < dims; ++d) {
      const int hi = (corner >> d) & 1;
      w *= hi ? weight[d] : 1.0 - weight[d];
      flat += stride * static_cast<std::uint64_t>(cell[d] + hi);
      stride *= static_cast<std::uint64_t>(map.axes[d].size());
    }
    if (w != 0.0) result.c += w * map.values.row(static_cast<Eigen::Index>(flat)).transpose();
  }
  return result;
}

std::vector<std::vector<int>> total_degree_multi_indices(int dims, int degree) {
  if (dims < 1 || degree < 0)
    throw std::invalid_argument("total_degree_multi_indices: bad dims/degree");
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  enumerate_alphas(dims, degree, current, out);
  return out;
}

LegendreMap fit_legendre(const TrainingTable& table, int degree, const Vector& lo,
                         const Vector& hi) {
  const Eigen::Index dims = table.inputs.cols();
  const Eigen::Index n1 = table.inputs.rows();
  if (lo.size() != dims || hi.size() != dims)
    throw std::invalid_argument("fit_legendre: bound size mismatch");
  for (Eigen::Index d = 0; d < dims; ++d)
    if (!(lo[d] < hi[d])) throw std::invalid_argument("fit_legendre: empty input range");

  LegendreMap map;
  map.degree = degree;
  map.alphas = total_degree_multi_indices(static_cast<int>(dims), degree);
  map.lo = lo;
  map.hi = hi;
  const Eigen::Index basis_count = static_cast<Eigen::Index>(map.alphas.size());
  if (n1 < 2 * basis_count)
    throw std::invalid_argument("fit_legendre: need at least 2 * " + std::to_string(basis_count) +
                                " samples, got " + std::to_string(n1));

  Matrix design(n1, basis_count);
  std::vector<std::vector<double>> p1d(dims);
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index d = 0; d < dims; ++d) {
      const double t = 2.0 * (table.inputs(i, d) - lo[d]) / (hi[d] - lo[d]) - 1.0;
      legendre_row(t, degree, p1d[d]);
    }
    for (Eigen::Index b = 0; b < basis_count; ++b) {
      double v = 1.0;
      for (Eigen::Index d = 0; d < dims; ++d) v *= p1d[d][map.alphas[b][d]];
      design(i, b) = v;
    }
  }

  const PivotedQr f = qr_pivoted(design);
  if (f.rank < basis_count)
    throw std::runtime_error("fit_legendre: design matrix rank " + std::to_string(f.rank) +
                             " below basis count " + std::to_string(basis_count));
  map.coeffs = ls_solve(f, table.targets);
  return map;
}

MapEval eval_legendre(const LegendreMap& map, const Vector& q) {
  const Eigen::Index dims = map.lo.size();
  if (q.size() != dims) throw std::invalid_argument("eval_legendre: query dimension mismatch");

  MapEval result;
  std::vector<std::vector<double>> p1d(dims);
  for (Eigen::Index d = 0; d < dims; ++d) {
    double t = 2.0 * (q[d] - map.lo[d]) / (map.hi[d] - map.lo[d]) - 1.0;
    if (t < -1.0 || t > 1.0) {
      t = std::clamp(t, -1.0, 1.0);
      result.clamped = true;
    }
    legendre_row(t, map.degree, p1d[d]);
  }
  Vector basis(static_cast<Eigen::Index>(map.alphas.size()));
  for (Eigen::Index b = 0; b < basis.size(); ++b) {
    double v = 1.0;
    for (Eigen::Index d = 0; d < dims; ++d) v *= p1d[d][map.alphas[b][d]];
    basis[b] = v;
  }
  result.c = map.coeffs.transpose() * basis;
  return result;
}

KnnMap build_knn_map(TrainingTable table, int neighbors) {
  if (neighbors < 1) throw std::invalid_argument("build_knn_map: neighbors must be >= 1");
  if (table.inputs.rows() < neighbors)
    throw std::invalid_argument("build_knn_map: fewer training rows than neighbors");
  KnnMap map;
  map.tree = std::make_shared<KdTree>(table.inputs);
  map.table = std::move(table);
  map.neighbors = neighbors;
  return map;
}

MapEval eval_knn_ls(const KdTree& tree, const TrainingTable& table, const Vector& q,
                    int neighbors) {
  const Eigen::Index rt = table.inputs.cols();
  if (neighbors < rt + 1)
    throw std::invalid_argument("eval_knn_ls: need at least rt + 1 neighbors");
  const std::vector<int> nearest = tree.query(q, neighbors);

  Matrix design(neighbors, rt + 1);
  Matrix rhs(neighbors, table.targets.cols());
  for (int m = 0; m < neighbors; ++m) {
    design(m, 0) = 1.0;
    design.row(m).tail(rt) = table.inputs.row(nearest[m]) - q.transpose();
    rhs.row(m) = table.targets.row(nearest[m]);
  }

  MapEval result;
  const PivotedQr f = qr_pivoted(design);
  if (f.rank == rt + 1) {
    const Matrix solution = ls_solve(f, rhs);
    result.c = solution.row(0).transpose();
    return result;
  }

  // Degenerate neighbor geometry: inverse-distance average instead.
  result.fallback = true;
  double weight_sum = 0.0;
  Vector c = Vector::Zero(table.targets.cols());
  for (int m = 0; m < neighbors; ++m) {
    const double dist = (table.inputs.row(nearest[m]).transpose() - q).norm();
    if (dist == 0.0) {
      result.c = table.targets.row(nearest[m]).transpose();
      return result;
    }
    const double w = 1.0 / dist;
    weight_sum += w;
    c += w * table.targets.row(nearest[m]).transpose();
  }
  result.c = c / weight_sum;
  return result;
}

MapEval eval_knn_ls(const KnnMap& map, const Vector& q) {
  return eval_knn_ls(*map.tree, map.table, q, map.neighbors);
}

MapEval OnlineMap::eval(const Vector& q) const {
  switch (kind) {
    case MapKind::grid: return eval_grid(grid, q);
    case MapKind::legendre: return eval_legendre(legendre, q);
    case MapKind::knn: return eval_knn_ls(knn, q);
  }
  throw std::logic_error("OnlineMap::eval: bad kind");
}

int OnlineMap::output_dim() const {
  switch (kind) {
    case MapKind::grid: return static_cast<int>(grid.values.cols());
    case MapKind::legendre: return static_cast<int>(legendre.coeffs.cols());
    case MapKind::knn: return static_cast<int>(knn.table.targets.cols());
  }
  throw std::logic_error("OnlineMap::output_dim: bad kind");
}

void save_map(const std::string& path, const OnlineMap& map) {
  std::ofstream os = binio::open_out(path);
  binio::write_magic(os, "PMAP");
  binio::write_le<std::uint32_t>(os, 1);
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(map.kind));
  switch (map.kind) {
    case MapKind::grid: {
      binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(map.grid.axes.size()));
      for (const auto& axis : map.grid.axes) {
        binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(axis.size()));
        for (Eigen::Index i = 0; i < axis.size(); ++i) binio::write_le<double>(os, axis[i]);
      }
      binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(map.grid.values.cols()));
      for (Eigen::Index j = 0; j < map.grid.values.cols(); ++j)
        for (Eigen::Index i = 0; i < map.grid.values.rows(); ++i)
          binio::write_le<double>(os, map.grid.values(i, j));
      break;
    }
    case MapKind::legendre: {
      binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(map.legendre.lo.size()));
      binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(map.legendre.degree));
      binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(map.legendre.coeffs.cols()));
      for (Eigen::Index d = 0; d < map.legendre.lo.size(); ++d) {
        binio::write_le<double>(os, map.legendre.lo[d]);
        binio::write_le<double>(os, map.legendre.hi[d]);
      }
      for (Eigen::Index j = 0; j < map.legendre.coeffs.cols(); ++j)
        for (Eigen::Index i = 0; i < map.legendre.coeffs.rows(); ++i)
          binio::write_le<double>(os, map.legendre.coeffs(i, j));
      break;
    }
    case MapKind::knn: {
      binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(map.knn.table.inputs.rows()));
      binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(map.knn.table.inputs.cols()));
      binio::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(map.knn.table.targets.cols()));
      binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(map.knn.neighbors));
      for (Eigen::Index i = 0; i < map.knn.table.inputs.rows(); ++i)
        for (Eigen::Index j = 0; j < map.knn.table.inputs.cols(); ++j)
          binio::write_le<double>(os, map.knn.table.inputs(i, j));
      for (Eigen::Index i = 0; i < map.knn.table.targets.rows(); ++i)
        for (Eigen::Index j = 0; j < map.knn.table.targets.cols(); ++j)
          binio::write_le<double>(os, map.knn.table.targets(i, j));
      break;
    }
  }
  if (!os) throw std::runtime_error("save_map: write failed: " + path);
}

OnlineMap load_map(const std::string& path) {
  std::ifstream is = binio::open_in(path);
  binio::expect_magic(is, "PMAP", path);
  const auto version = binio::read_le<std::uint32_t>(is);
  if (version != 1)
    throw std::runtime_error("load_map: unsupported version " + std::to_string(version));
  OnlineMap map;
  const auto kind = binio::read_le<std::uint32_t>(is);
  if (kind > 2) throw std::runtime_error("load_map: unknown map kind " + std::to_string(kind));
  map.kind = static_cast<MapKind>(kind);
  switch (map.kind) {
    case MapKind::grid: {
      const auto dims = binio::read_le<std::uint32_t>(is);
      map.grid.axes.resize(dims);
      std::uint64_t total = 1;
      for (auto& axis : map.grid.axes) {
        const auto len = binio::read_le<std::uint64_t>(is);
        axis.resize(static_cast<Eigen::Index>(len));
        for (std::uint64_t i = 0; i < len; ++i)
          axis[static_cast<Eigen::Index>(i)] = binio::read_le<double>(is);
        total *= len;
      }
      const auto k = binio::read_le<std::uint64_t>(is);
      map.grid.values.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(k));
      for (Eigen::Index j = 0; j < map.grid.values.cols(); ++j)
        for (Eigen::Index i = 0; i < map.grid.values.rows(); ++i)
          map.grid.values(i, j) = binio::read_le<double>(is);
      break;
    }
    case MapKind::legendre: {
      const auto dims = binio::read_le<std::uint32_t>(is);
      map.legendre.degree = static_cast<int>(binio::read_le<std::uint32_t>(is));
      const auto k = binio::read_le<std::uint64_t>(is);
      map.legendre.lo.resize(dims);
      map.legendre.hi.resize(dims);
      for (std::uint32_t d = 0; d < dims; ++d) {
        map.legendre.lo[d] = binio::read_le<double>(is);
        map.legendre.hi[d] = binio::read_le<double>(is);
      }
      map.legendre.alphas = total_degree_multi_indices(static_cast<int>(dims), map.legendre.degree);
      map.legendre.coeffs.resize(static_cast<Eigen::Index>(map.legendre.alphas.size()),
                                 static_cast<Eigen::Index>(k));
      for (Eigen::Index j = 0; j < map.legendre.coeffs.cols(); ++j)
        for (Eigen::Index i = 0; i < map.legendre.coeffs.rows(); ++i)
          map.legendre.coeffs(i, j) = binio::read_le<double>(is);
      break;
    }
    case MapKind::knn: {
      const auto n1 = binio::read_le<std::uint64_t>(is);
      const auto rt = binio::read_le<std::uint64_t>(is);
      const auto k = binio::read_le<std::uint64_t>(is);
      const auto neighbors = binio::read_le<std::uint32_t>(is);
      TrainingTable table;
      table.inputs.resize(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(rt));
      table.targets.resize(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(k));
      for (Eigen::Index i = 0; i < table.inputs.rows(); ++i)
        for (Eigen::Index j = 0; j < table.inputs.cols(); ++j)
          table.inputs(i, j) = binio::read_le<double>(is);
      for (Eigen::Index i = 0; i < table.targets.rows(); ++i)
        for (Eigen::Index j = 0; j < table.targets.cols(); ++j)
          table.targets(i, j) = binio::read_le<double>(is);
      map.knn = build_knn_map(std::move(table), static_cast<int>(neighbors));
      break;
    }
  }
  if (!is) throw std::runtime_error("load_map: truncated file: " + path);
  return map;
}

}  // namespace epod
