#pragma once

#include <vector>

#include <Eigen/Core>

#include "scantrack/point_cloud.hpp"

namespace scantrack {

struct RayHit {
  bool hit = false;
  double t = 0.0;               // along the (possibly unnormalized) direction
  int triangle = -1;            // index into the soup
  int32_t object_id = 0;        // tag supplied at insertion time
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();  // geometric, unit, faces the ray origin
};

/// Median-split bounding volume hierarchy over a triangle soup.
/// Triangles are double-sided for intersection; hit normals are flipped to
/// oppose the ray direction.
class TriangleBvh {
 public:
  TriangleBvh() = default;

  /// Appends all triangles of a mesh, tagged with object_id.
  void add_mesh(const TriangleMesh& mesh, int32_t object_id);

  /// Builds the hierarchy; call once after the last add_mesh.
  void build();

  bool built() const { return !nodes_.empty() || tri_a_.empty(); }
  size_t triangle_count() const { return tri_a_.size(); }

  /// Closest intersection with t in (t_min, t_max).
  RayHit raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                 double t_min = 1e-9, double t_max = 1e30) const;

 private:
  struct Node {
    Eigen::Vector3d lo, hi;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf triangle range
  };

  int build_recursive(int begin, int end);

  std::vector<Eigen::Vector3d> tri_a_, tri_b_, tri_c_;
  std::vector<Eigen::Vector3d> centroids_;
  std::vector<int32_t> ids_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;

  static constexpr int kLeafSize = 4;
};

}  // namespace scantrack
