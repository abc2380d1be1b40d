#include "scantrack/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace scantrack {

void KdTree3::build(const std::vector<Eigen::Vector3d>& points) {
  points_ = points;
  nodes_.clear();
  order_.resize(points_.size());
  for (size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  root_ = points_.empty() ? -1 : build_recursive(0, static_cast<int>(points_.size()));
}

int KdTree3::build_recursive(int begin, int end) {
  Node node;
  node.lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  for (int i = begin; i < end; ++i) {
    node.lo = node.lo.cwiseMin(points_[order_[i]]);
    node.hi = node.hi.cwiseMax(points_[order_[i]]);
  }
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  if (end - begin <= kLeafSize) {
    nodes_[node_index].begin = begin;
    nodes_[node_index].end = end;
    return node_index;
  }

  int axis = 0;
  (node.hi - node.lo).maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  // Tie-break by index so construction is independent of libstdc++ internals.
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  nodes_[node_index].axis = axis;
  nodes_[node_index].split = points_[order_[mid]][axis];
  nodes_[node_index].begin = nodes_[node_index].end = 0;
  const int left = build_recursive(begin, mid);
  const int right = build_recursive(mid, end);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

namespace {

double sq_dist_to_box(const Eigen::Vector3d& q, const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  double d = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double e = std::max({lo[k] - q[k], 0.0, q[k] - hi[k]});
    d += e * e;
  }
  return d;
}

}  // namespace

int KdTree3::nearest(const Eigen::Vector3d& query, double* sq_dist) const {
  if (root_ < 0) return -1;
  int best = -1;
  double best_sq = std::numeric_limits<double>::infinity();

  // Explicit stack; depth bounded by log2(n) + leaf split slack.
  std::vector<int> stack;
  stack.reserve(64);
  stack.push_back(root_);
  while (!stack.empty()) {
    const int ni = stack.back();
    stack.pop_back();
    const Node& node = nodes_[ni];
    if (sq_dist_to_box(query, node.lo, node.hi) >= best_sq) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        const double d = (points_[idx] - query).squaredNorm();
        if (d < best_sq || (d == best_sq && idx < best)) {
          best_sq = d;
          best = idx;
        }
      }
      continue;
    }
    // Visit the near side first.
    if (query[node.axis] < node.split) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  if (sq_dist) *sq_dist = best_sq;
  return best;
}

std::vector<int> KdTree3::knn(const Eigen::Vector3d& query, int k) const {
  std::vector<int> result;
  if (root_ < 0 || k <= 0) return result;

  using Entry = std::pair<double, int>;  // (sq distance, index)
  std::priority_queue<Entry> heap;       // max-heap on distance

  std::vector<int> stack;
  stack.reserve(64);
  stack.push_back(root_);
  while (!stack.empty()) {
    const int ni = stack.back();
    stack.pop_back();
    const Node& node = nodes_[ni];
    const double box_d = sq_dist_to_box(query, node.lo, node.hi);
    if (static_cast<int>(heap.size()) == k && box_d > heap.top().first) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        const double d = (points_[idx] - query).squaredNorm();
        if (static_cast<int>(heap.size()) < k) {
          heap.emplace(d, idx);
        } else if (d < heap.top().first ||
                   (d == heap.top().first && idx < heap.top().second)) {
          heap.pop();
          heap.emplace(d, idx);
        }
      }
      continue;
    }
    if (query[node.axis] < node.split) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }

  result.resize(heap.size());
  for (int i = static_cast<int>(heap.size()) - 1; i >= 0; --i) {
    result[i] = heap.top().second;
    heap.pop();
  }
  return result;
}

std::vector<int> KdTree3::radius_search(const Eigen::Vector3d& query, double radius) const {
  std::vector<int> result;
  if (root_ < 0 || radius <= 0.0) return result;
  const double r_sq = radius * radius;

  std::vector<int> stack;
  stack.reserve(64);
  stack.push_back(root_);
  while (!stack.empty()) {
    const int ni = stack.back();
    stack.pop_back();
    const Node& node = nodes_[ni];
    if (sq_dist_to_box(query, node.lo, node.hi) > r_sq) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        if ((points_[idx] - query).squaredNorm() <= r_sq) result.push_back(idx);
      }
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace scantrack
