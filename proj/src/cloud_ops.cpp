#include "scantrack/cloud_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "scantrack/errors.hpp"
#include "scantrack/kdtree.hpp"
#include "scantrack/parallel.hpp"

namespace scantrack {

namespace {

PointCloud backproject_impl(const DepthImage& depth, const CameraIntrinsics& intr,
                            const InstanceMask* mask, int32_t only_id) {
  intr.validate();
  if (depth.width() != intr.width || depth.height() != intr.height) {
    throw InvalidInputError("backproject: depth dimensions do not match intrinsics");
  }
  if (mask && (mask->width() != intr.width || mask->height() != intr.height)) {
    throw InvalidInputError("backproject: mask dimensions do not match intrinsics");
  }

  PointCloud cloud;
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const double d = depth.at(u, v);
      if (d <= 0.0) continue;
      int32_t label = 0;
      if (mask) {
        label = mask->at(u, v);
        if (label <= 0) continue;
        if (only_id > 0 && label != only_id) continue;
      }
      cloud.positions.emplace_back((u - intr.cx) * d / intr.fx, (v - intr.cy) * d / intr.fy, d);
      if (mask) cloud.labels.push_back(label);
    }
  }
  return cloud;
}

}  // namespace

PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& intr,
                       const InstanceMask* mask) {
  return backproject_impl(depth, intr, mask, 0);
}

PointCloud backproject_object(const DepthImage& depth, const CameraIntrinsics& intr,
                              const InstanceMask& mask, int32_t object_id) {
  return backproject_impl(depth, intr, &mask, object_id);
}

PointCloud estimate_normals(const PointCloud& cloud, int k) {
  if (k < 3) throw InvalidInputError("estimate_normals: k must be >= 3");
  if (cloud.size() < static_cast<size_t>(k)) {
    throw InvalidInputError("estimate_normals: cloud smaller than k");
  }

  KdTree3 tree(cloud.positions);
  PointCloud out = cloud;
  out.normals.assign(cloud.size(), Eigen::Vector3d::Zero());

  parallel_for(cloud.size(), [&](size_t i) {
    const auto nbrs = tree.knn(cloud.positions[i], k);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int j : nbrs) mean += cloud.positions[j];
    mean /= static_cast<double>(nbrs.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j : nbrs) {
      const Eigen::Vector3d d = cloud.positions[j] - mean;
      cov += d * d.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Vector3d n = eig.eigenvectors().col(0);  // smallest eigenvalue

    // Collinear neighborhood: the two smallest eigenvalues both vanish and
    // the perpendicular direction is arbitrary. Build one deterministically
    // from the line direction.
    const double lam_max = std::max(eig.eigenvalues()[2], 1e-300);
    if (eig.eigenvalues()[1] <= 1e-12 * lam_max) {
      const Eigen::Vector3d line = eig.eigenvectors().col(2);
      Eigen::Vector3d perp = line.cross(Eigen::Vector3d::UnitX());
      if (perp.squaredNorm() < 1e-12) perp = line.cross(Eigen::Vector3d::UnitY());
      n = perp.normalized();
      // Lexicographically smallest of the +/- pair.
      const Eigen::Vector3d neg = -n;
      if (std::lexicographical_compare(neg.data(), neg.data() + 3, n.data(), n.data() + 3)) {
        n = neg;
      }
    }

    if (n.squaredNorm() <= 0.0 || !n.allFinite()) n = Eigen::Vector3d::UnitZ();
    n.normalize();
    // Orient toward the frame origin (the camera for a back-projected cloud).
    if (n.dot(cloud.positions[i]) > 0.0) n = -n;
    out.normals[i] = n;
  });
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double rho) {
  if (!(rho > 0.0)) throw InvalidInputError("voxel_downsample: voxel edge must be positive");
  if (cloud.empty()) return {};

  struct Accum {
    Eigen::Vector3d pos_sum = Eigen::Vector3d::Zero();
    Eigen::Vector3d nrm_sum = Eigen::Vector3d::Zero();
    Eigen::Vector3d first_normal = Eigen::Vector3d::Zero();
    std::map<int32_t, int> label_votes;
    int count = 0;
  };

  // Ordered keys make the output independent of hash iteration order.
  std::map<std::array<int64_t, 3>, Accum> voxels;
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d& p = cloud.positions[i];
    const std::array<int64_t, 3> key = {static_cast<int64_t>(std::floor(p.x() / rho)),
                                        static_cast<int64_t>(std::floor(p.y() / rho)),
                                        static_cast<int64_t>(std::floor(p.z() / rho))};
    Accum& a = voxels[key];
    a.pos_sum += p;
    if (cloud.has_normals()) {
      if (a.count == 0) a.first_normal = cloud.normals[i];
      a.nrm_sum += cloud.normals[i];
    }
    if (cloud.has_labels()) a.label_votes[cloud.labels[i]]++;
    a.count++;
  }

  PointCloud out;
  out.positions.reserve(voxels.size());
  if (cloud.has_normals()) out.normals.reserve(voxels.size());
  if (cloud.has_labels()) out.labels.reserve(voxels.size());
  for (const auto& [key, a] : voxels) {
    out.positions.push_back(a.pos_sum / a.count);
    if (cloud.has_normals()) {
      Eigen::Vector3d n = a.nrm_sum;
      if (n.squaredNorm() < 1e-12) n = a.first_normal;  // cancelled out
      out.normals.push_back(n.normalized());
    }
    if (cloud.has_labels()) {
      int32_t best_label = 0;
      int best_votes = -1;
      for (const auto& [label, votes] : a.label_votes) {
        if (votes > best_votes) {  // map order => smallest label wins ties
          best_votes = votes;
          best_label = label;
        }
      }
      out.labels.push_back(best_label);
    }
  }
  return out;
}

}  // namespace scantrack
