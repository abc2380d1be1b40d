#pragma once

#include <vector>

#include "scantrack/bvh.hpp"
#include "scantrack/camera.hpp"
#include "scantrack/scene.hpp"

namespace scantrack {

struct TrajectoryParams {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.55;
  int n_azimuth = 16;
  int n_elevation = 16;
  double azimuth_start_deg = 0.0;
  double azimuth_span_deg = 90.0;   // 90 = quarter sphere, 360 = full ring
  double elevation_min_deg = 25.0;  // measured up from the horizontal plane
  double elevation_max_deg = 90.0;  // 90 = straight top-down
};

/// Camera-to-world poses on the upper hemisphere around params.center, the
/// optical axis through the center. Elevation-major ordering, sweeping from
/// the top ring down so early frames see the workspace with least occlusion.
/// A single elevation sample is placed at elevation_max (top-down by default).
/// The in-image up direction follows world +z projected; at the pole it falls
/// back to world +y deterministically.
std::vector<RigidTransform> hemisphere_trajectory(const TrajectoryParams& params);

struct RenderOptions {
  double max_depth = 5.0;      // hits beyond this become invalid (0)
  double noise_sigma = 0.0;    // additive Gaussian depth noise, meters
  uint64_t noise_seed = 0;     // combined with the frame index
};

/// Renders one depth + instance-id frame by closest ray-triangle intersection,
/// rays cast through integer pixel coordinates so backprojection inverts the
/// rendering exactly. bvh must contain the scene's world-space triangles
/// (see build_scene_bvh); the z=0 ground patch is intersected analytically.
ScanFrame render_frame(const SceneModel& scene, const TriangleBvh& bvh,
                       const RigidTransform& cam_pose, const CameraIntrinsics& intr,
                       int frame_index = 0, const RenderOptions& options = {});

/// Convenience wrapper that builds the BVH internally.
ScanFrame render_frame(const SceneModel& scene, const RigidTransform& cam_pose,
                       const CameraIntrinsics& intr, int frame_index = 0,
                       const RenderOptions& options = {});

/// World-space BVH over all posed object meshes, tagged by object id.
TriangleBvh build_scene_bvh(const SceneModel& scene);

/// Union over all views of the masked, world-transformed back-projections,
/// voxel-deduplicated at dedup_rho. Normals are estimated per view (oriented
/// to that view's camera) when with_normals is set.
PointCloud fully_visible_cloud(const SceneModel& scene, const std::vector<RigidTransform>& trajectory,
                               const CameraIntrinsics& intr, double dedup_rho = 0.003,
                               bool with_normals = true, int normal_k = 16);

}  // namespace scantrack
