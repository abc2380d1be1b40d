#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace scantrack {

/// Static kd-tree over 3D points. Build once, query from any thread.
/// Construction and query results are deterministic for a given input order.
class KdTree3 {
 public:
  KdTree3() = default;
  explicit KdTree3(const std::vector<Eigen::Vector3d>& points) { build(points); }

  void build(const std::vector<Eigen::Vector3d>& points);

  size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Index of the nearest point, or -1 when empty. Squared distance out-param optional.
  int nearest(const Eigen::Vector3d& query, double* sq_dist = nullptr) const;

  /// Indices of the k nearest points, ordered by increasing distance
  /// (ties broken by smaller index).
  std::vector<int> knn(const Eigen::Vector3d& query, int k) const;

  /// Indices of all points within radius, ordered by increasing index.
  std::vector<int> radius_search(const Eigen::Vector3d& query, double radius) const;

 private:
  struct Node {
    int left = -1;
    int right = -1;
    int begin = 0;  // leaf payload range into order_
    int end = 0;
    int axis = 0;
    double split = 0.0;
    Eigen::Vector3d lo, hi;  // bounding box
  };

  int build_recursive(int begin, int end);

  std::vector<Eigen::Vector3d> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;

  static constexpr int kLeafSize = 16;
};

}  // namespace scantrack
