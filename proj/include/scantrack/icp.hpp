#pragma once

#include "scantrack/kdtree.hpp"
#include "scantrack/point_cloud.hpp"

namespace scantrack {

struct IcpParams {
  double max_corr_dist = 0.02;   // correspondence rejection radius, meters
  double converge_eps = 1e-6;    // pose-delta threshold (rad + m combined)
  int max_iterations = 30;
  double min_inlier_fraction = 0.3;
};

struct IcpResult {
  RigidTransform transform;      // maps source into the target frame
  double rms_residual = 0.0;     // final point-to-plane RMS, meters
  double inlier_fraction = 0.0;  // source points with a correspondence
  int iterations = 0;
  bool succeeded = false;        // inlier_fraction >= min_inlier_fraction
};

/// Point-to-plane ICP aligning source onto target. The target must carry
/// normals. Each iteration: nearest-neighbor correspondences within
/// max_corr_dist, a linearized 6-DoF least-squares solve, then rotation
/// re-orthonormalization. Deterministic: fixed iteration order, no sampling.
/// Both clouds need >= 10 points (InvalidInputError otherwise).
IcpResult icp_register(const PointCloud& source, const PointCloud& target,
                       const RigidTransform& init, const IcpParams& params = {});

/// Variant reusing a prebuilt kd-tree over target.positions.
IcpResult icp_register(const PointCloud& source, const PointCloud& target, const KdTree3& target_tree,
                       const RigidTransform& init, const IcpParams& params = {});

}  // namespace scantrack
