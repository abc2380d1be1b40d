#include "scantrack/point_cloud.hpp"

#include <cmath>

#include "scantrack/errors.hpp"

namespace scantrack {

void PointCloud::reserve(size_t n) {
  positions.reserve(n);
  if (has_normals()) normals.reserve(n);
  if (has_labels()) labels.reserve(n);
}

void PointCloud::push_back(const Eigen::Vector3d& p) { positions.push_back(p); }

void PointCloud::validate() const {
  if (has_normals() && normals.size() != positions.size()) {
    throw InvalidInputError("point cloud: normal count does not match position count");
  }
  if (has_labels() && labels.size() != positions.size()) {
    throw InvalidInputError("point cloud: label count does not match position count");
  }
  for (const auto& p : positions) {
    if (!p.allFinite()) throw InvalidInputError("point cloud: non-finite position");
  }
  for (const auto& n : normals) {
    if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-6) {
      throw InvalidInputError("point cloud: normal not unit length");
    }
  }
}

Eigen::Vector3d PointCloud::centroid() const {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  if (positions.empty()) return c;
  for (const auto& p : positions) c += p;
  return c / static_cast<double>(positions.size());
}

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& t) {
  PointCloud out;
  out.positions.reserve(cloud.positions.size());
  for (const auto& p : cloud.positions) out.positions.push_back(t.apply(p));
  out.normals.reserve(cloud.normals.size());
  for (const auto& n : cloud.normals) out.normals.push_back(t.rotate(n));
  out.labels = cloud.labels;
  return out;
}

void TriangleMesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= n) throw InvalidInputError("mesh: vertex index out of range");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw InvalidInputError("mesh: triangle with repeated vertex index");
    }
  }
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw InvalidInputError("mesh: non-finite vertex");
  }
}

double TriangleMesh::surface_area() const {
  double area = 0.0;
  for (const auto& tri : triangles) {
    const Eigen::Vector3d& a = vertices[tri[0]];
    area += 0.5 * (vertices[tri[1]] - a).cross(vertices[tri[2]] - a).norm();
  }
  return area;
}

Eigen::Vector3d TriangleMesh::face_normal(int i) const {
  const auto& tri = triangles[i];
  const Eigen::Vector3d n =
      (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
  const double len = n.norm();
  if (len <= 0.0) return Eigen::Vector3d::UnitZ();
  return n / len;
}

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& t) {
  TriangleMesh out;
  out.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) out.vertices.push_back(t.apply(v));
  out.triangles = mesh.triangles;
  return out;
}

}  // namespace scantrack
