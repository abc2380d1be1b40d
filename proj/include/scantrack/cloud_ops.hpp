#pragma once

#include <optional>

#include "scantrack/camera.hpp"
#include "scantrack/point_cloud.hpp"

namespace scantrack {

/// Back-projects valid depth pixels through the pinhole model:
///   p = ((u - cx) * d / fx, (v - cy) * d / fy, d)
/// Pixels with depth 0 are skipped. With a mask, only pixels labeled > 0 are
/// kept and labels are copied onto the cloud. Row-major pixel order.
PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& intr,
                       const InstanceMask* mask = nullptr);

/// As above but keeps only pixels carrying object_id.
PointCloud backproject_object(const DepthImage& depth, const CameraIntrinsics& intr,
                              const InstanceMask& mask, int32_t object_id);

/// Per-point normal from the k-nearest-neighbor covariance (smallest
/// eigenvector), sign-flipped to face the origin of the cloud's frame.
/// Collinear neighborhoods fall back to a deterministic perpendicular.
/// Requires cloud.size() >= k >= 3.
PointCloud estimate_normals(const PointCloud& cloud, int k);

/// One centroid per occupied voxel of edge length rho. Labels resolve by
/// majority (smallest label on ties); normals average and renormalize.
/// Output ordered by voxel key so downsampling is reproducible bit-for-bit.
PointCloud voxel_downsample(const PointCloud& cloud, double rho);

}  // namespace scantrack
