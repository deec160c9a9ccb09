// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_KDTREE_HPP
#define EPOD_KDTREE_HPP

#include <vector>

#include "epod/sparse.hpp"

namespace epod {

// Static k-d tree over row-vector points with exact k-nearest-neighbor
// queries. Median splits on the widest dimension of each node's bounding
// box; ties in distance break toward the lower point index, so results
// match a stable linear scan exactly.
class KdTree {
 public:
  explicit KdTree(Matrix points, int leaf_size = 16);

  // Indices of the k nearest points by Euclidean distance, ordered by
  // (distance, index). Throws when k exceeds the point count.
  std::vector<int> query(const Vector& target, int k) const;

  int size() const { return static_cast<int>(points_.rows()); }
  int dims() const { return static_cast<int>(points_.cols()); }
  const Matrix& points() const { return points_; }

 private:
  struct Node {
    int begin = 0, end = 0;    // range in order_
    int axis = -1;             // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
  };

  int build(int begin, int end);
  void search(int node, const Vector& target, int k,
              std::vector<std::pair<double, int>>& heap) const;

  Matrix points_;
  int leaf_size_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace epod

#endif  // EPOD_KDTREE_HPP
