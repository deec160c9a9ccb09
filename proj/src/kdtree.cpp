// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "epod/kdtree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace epod {

namespace {

// a beats b when closer, or equally close with a smaller index.
inline bool better(const std::pair<double, int>& a, const std::pair<double, int>& b) {
  return a.first < b.first || (a.first == b.first && a.second < b.second);
}

}  // namespace

KdTree::KdTree(Matrix points, int leaf_size) : points_(std::move(points)), leaf_size_(leaf_size) {
  if (points_.rows() < 1) throw std::invalid_argument("KdTree: need at least one point");
  if (leaf_size_ < 1) throw std::invalid_argument("KdTree: leaf size must be >= 1");
  order_.resize(points_.rows());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * points_.rows() / leaf_size_ + 2);
  root_ = build(0, static_cast<int>(points_.rows()));
}

int KdTree::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  if (end - begin <= leaf_size_) return id;

  // Split the widest coordinate of the bounding box at its median.
  int axis = 0;
  double widest = -1.0;
  for (int d = 0; d < dims(); ++d) {
    double lo = points_(order_[begin], d);
    double hi = lo;
    for (int i = begin + 1; i < end; ++i) {
      const double v = points_(order_[i], d);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = d;
    }
  }
  if (widest <= 0.0) return id;  // all points coincide, keep as leaf

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_(a, axis) < points_(b, axis); });

  nodes_[id].axis = axis;
  nodes_[id].threshold = points_(order_[mid], axis);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(int node_id, const Vector& target, int k,
                    std::vector<std::pair<double, int>>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      const double d2 = (points_.row(idx).transpose() - target).squaredNorm();
      const std::pair<double, int> candidate{d2, idx};
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(candidate);
        std::push_heap(heap.begin(), heap.end(), better);
      } else if (better(candidate, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), better);
        heap.back() = candidate;
        std::push_heap(heap.begin(), heap.end(), better);
      }
    }
    return;
  }

  const double delta = target[node.axis] - node.threshold;
  const int near = delta < 0.0 ? node.left : node.right;
  const int far = delta < 0.0 ? node.right : node.left;
  search(near, target, k, heap);
  // The far side can still hold an equal-distance, lower-index winner, so
  // prune only on strict excess.
  if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().first)
    search(far, target, k, heap);
}

std::vector<int> KdTree::query(const Vector& target, int k) const {
  if (k < 1) throw std::invalid_argument("KdTree::query: k must be >= 1");
  if (k > size()) throw std::invalid_argument("KdTree::query: k exceeds the point count");
  if (target.size() != points_.cols())
    throw std::invalid_argument("KdTree::query: dimension mismatch");

  std::vector<std::pair<double, int>> heap;
  heap.reserve(k);
  search(root_, target, k, heap);
  std::sort(heap.begin(), heap.end(),
            [](const auto& a, const auto& b) { return better(a, b); });
  std::vector<int> out(heap.size());
  for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].second;
  return out;
}

}  // namespace epod
