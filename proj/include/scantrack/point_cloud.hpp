#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "scantrack/transform.hpp"

namespace scantrack {

/// Unstructured 3D point set with optional unit normals and instance labels.
/// Parallel arrays: when present, normals/labels match positions in length.
struct PointCloud {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3d> normals;  // unit length when present
  std::vector<int32_t> labels;           // 0 = unlabeled/background

  size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_labels() const { return !labels.empty(); }

  void reserve(size_t n);

  /// Appends one point; pass a zero normal / label 0 when the cloud does not
  /// carry that channel.
  void push_back(const Eigen::Vector3d& p);

  /// Checks finiteness, unit normals (1e-6) and array length agreement.
  /// Throws InvalidInputError on violation.
  void validate() const;

  Eigen::Vector3d centroid() const;
};

/// Transforms positions by p' = R*p + t; normals rotate, labels carry over.
PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& t);

/// Indexed triangle mesh.
struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Eigen::Vector3i> triangles;

  bool empty() const { return triangles.empty(); }

  /// Index bounds and degenerate-index checks. Throws InvalidInputError.
  void validate() const;

  double surface_area() const;

  /// Unit normal of triangle i from its winding order.
  Eigen::Vector3d face_normal(int i) const;
};

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& t);

}  // namespace scantrack
