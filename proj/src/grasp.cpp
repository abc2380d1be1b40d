#include "scantrack/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scantrack/cloud_ops.hpp"
#include "scantrack/errors.hpp"
#include "scantrack/io.hpp"
#include "scantrack/kdtree.hpp"

namespace scantrack {

void GripperModel::validate() const {
  if (!(max_width > 0 && finger_depth > 0 && finger_thickness > 0 && palm_depth > 0)) {
    throw InvalidInputError("gripper: all dimensions must be positive");
  }
}

void GraspPose::validate(const GripperModel& gripper) const {
  if (!is_rotation_matrix(rotation)) {
    throw InvalidInputError("grasp: rotation is not orthonormal with det +1");
  }
  if (!(width >= 0.0 && width <= gripper.max_width + 1e-12)) {
    throw InvalidInputError("grasp: width outside [0, max_width]");
  }
}

uint64_t GraspPose::hash() const {
  // FNV-1a over micrometer/microradian-quantized fields.
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<uint64_t>(v >> (8 * b)) & 0xffull;
      h *= 1099511628211ull;
    }
  };
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) mix(std::llround(rotation(r, c) * 1e6));
  }
  for (int k = 0; k < 3; ++k) mix(std::llround(translation[k] * 1e6));
  mix(std::llround(width * 1e6));
  return h;
}

void GraspSet::sort_and_truncate(int n_keep) {
  std::stable_sort(grasps.begin(), grasps.end(), [](const GraspPose& a, const GraspPose& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.hash() < b.hash();
  });
  if (n_keep > 0 && static_cast<int>(grasps.size()) > n_keep) grasps.resize(n_keep);
}

bool collision_check(const GraspPose& grasp, const PointCloud& scene,
                     const GripperModel& gripper) {
  const Eigen::Matrix3d to_local = grasp.rotation.transpose();
  const double half_w = grasp.width / 2.0;
  const double half_fd = gripper.finger_depth / 2.0;
  const double half_th = gripper.finger_thickness / 2.0;

  for (const auto& p : scene.positions) {
    const Eigen::Vector3d q = to_local * (p - grasp.translation);
    const double a = q[0];         // approach axis: palm at negative a
    const double c = std::abs(q[1]);  // closing axis, symmetric
    const double f = std::abs(q[2]);  // finger axis

    if (f > half_th) continue;
    // Finger blocks: outside the jaw, alongside the grasped material.
    if (a >= -half_fd && a <= half_fd && c >= half_w && c <= half_w + gripper.finger_thickness) {
      return true;
    }
    // Palm block behind the fingers, spanning the whole jaw.
    if (a >= -half_fd - gripper.palm_depth && a <= -half_fd &&
        c <= half_w + gripper.finger_thickness) {
      return true;
    }
  }
  return false;
}

GraspSet sample_grasps(const MergedScene& scene, const GripperModel& gripper,
                       const GraspSamplerParams& params) {
  gripper.validate();
  GraspSet result;
  const PointCloud* cloud = &scene.cloud;
  PointCloud with_normals_storage;
  if (cloud->size() < 100) return result;
  if (!cloud->has_normals()) {
    with_normals_storage = estimate_normals(*cloud, params.normal_k);
    cloud = &with_normals_storage;
  }

  const double alpha = params.antipodal_angle_deg * M_PI / 180.0;
  const double cos_alpha = std::cos(alpha);
  const double max_pair_dist = gripper.max_width - 2.0 * params.clearance;
  if (max_pair_dist <= 0.0) return result;

  const KdTree3 tree(cloud->positions);
  const size_t stride =
      std::max<size_t>(1, (cloud->size() + params.max_seeds - 1) / params.max_seeds);

  for (size_t seed = 0; seed < cloud->size(); seed += stride) {
    const Eigen::Vector3d& p1 = cloud->positions[seed];
    const Eigen::Vector3d& n1 = cloud->normals[seed];

    // Candidate partners live in a thin cylinder cast into the surface.
    const auto nearby = tree.radius_search(p1, max_pair_dist);
    int best_partner = -1;
    double best_angle = alpha;
    for (int j : nearby) {
      if (static_cast<size_t>(j) == seed) continue;
      const Eigen::Vector3d d = cloud->positions[j] - p1;  // p1 -> p2
      const double along = d.dot(-n1);
      if (along <= 1e-6) continue;  // partner must lie on the inward side
      const double radial_sq = (d + along * n1).squaredNorm();
      if (radial_sq > params.pair_cylinder_radius * params.pair_cylinder_radius) continue;

      const double dist = d.norm();
      const Eigen::Vector3d dir12 = d / dist;
      // Antipodal test with outward normals on both contacts.
      const double a1 = std::acos(std::clamp(n1.dot(-dir12), -1.0, 1.0));
      const double a2 = std::acos(std::clamp(cloud->normals[j].dot(dir12), -1.0, 1.0));
      const double worst = std::max(a1, a2);
      if (worst < best_angle) {
        best_angle = worst;
        best_partner = j;
      }
    }
    if (best_partner < 0) continue;

    const Eigen::Vector3d& p2 = cloud->positions[best_partner];
    const Eigen::Vector3d closing = (p2 - p1).normalized();
    const Eigen::Vector3d center = 0.5 * (p1 + p2);

    // Approach along the viewing ray, projected perpendicular to the jaw.
    Eigen::Vector3d view = center - params.view_origin;
    if (view.squaredNorm() < 1e-12) view = Eigen::Vector3d::UnitZ();
    Eigen::Vector3d approach = view - view.dot(closing) * closing;
    if (approach.squaredNorm() < 1e-10) {
      approach = Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitX().dot(closing) * closing;
      if (approach.squaredNorm() < 1e-10) {
        approach = Eigen::Vector3d::UnitY() - Eigen::Vector3d::UnitY().dot(closing) * closing;
      }
    }
    approach.normalize();

    GraspPose grasp;
    grasp.rotation.col(0) = approach;
    grasp.rotation.col(1) = closing;
    grasp.rotation.col(2) = approach.cross(closing);
    grasp.rotation = orthonormalized(grasp.rotation);
    grasp.translation = center;
    grasp.width = (p2 - p1).norm() + 2.0 * params.clearance;
    if (grasp.width > gripper.max_width) continue;
    grasp.score = 1.0 - best_angle / alpha;

    if (collision_check(grasp, *cloud, gripper)) continue;
    result.grasps.push_back(grasp);
  }

  result.sort_and_truncate(params.n_keep);
  return result;
}

void write_grasps(const std::string& path, const GraspSet& grasps) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("write_grasps: cannot open " + path);
  for (const auto& g : grasps.grasps) {
    out << format_fixed(g.score) << ' ' << format_fixed(g.width) << ' '
        << format_fixed(g.translation.x()) << ' ' << format_fixed(g.translation.y()) << ' '
        << format_fixed(g.translation.z());
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ' ' << format_fixed(g.rotation(r, c));
    }
    out << '\n';
  }
}

GraspSet read_grasps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("read_grasps: cannot open " + path);
  GraspSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    GraspPose g;
    ss >> g.score >> g.width >> g.translation.x() >> g.translation.y() >> g.translation.z();
    Eigen::Matrix3d r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ss >> r(i, j);
    }
    if (!ss) throw InvalidInputError("read_grasps: malformed line in " + path);
    g.rotation = orthonormalized(r);
    set.grasps.push_back(g);
  }
  return set;
}

}  // namespace scantrack
