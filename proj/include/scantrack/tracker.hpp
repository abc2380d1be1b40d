#pragma once

#include <vector>

#include "scantrack/camera.hpp"
#include "scantrack/icp.hpp"
#include "scantrack/kdtree.hpp"
#include "scantrack/point_cloud.hpp"

namespace scantrack {

struct TrackerParams {
  double theta_key_deg = 10.0;  // keyframe rotation threshold
  double d_key = 0.05;          // keyframe translation threshold, meters
  int pool_query_size = 3;      // K nearest keyframes used for refinement
  IcpParams icp;
  int min_mask_pixels = 50;     // registration gate for the first observation
  double track_voxel = 0.005;   // downsample edge for per-frame clouds
  int normal_k = 16;
  bool refine_with_pool = true; // drift-mitigation refinement on/off
};

/// Informative historical observation kept for drift mitigation.
struct Keyframe {
  int id = 0;
  int frame_index = 0;
  PointCloud object_cloud;  // masked, downsampled, with normals; that frame's camera frame
  RigidTransform pose;      // model-to-camera at that frame
  KdTree3 tree;             // over object_cloud positions
};

class KeyframeMemoryPool {
 public:
  KeyframeMemoryPool() = default;
  KeyframeMemoryPool(double theta_key_deg, double d_key, int query_size);

  /// max(rotation / theta_key, translation / d_key) against a keyframe pose.
  double normalized_distance(const RigidTransform& pose, const Keyframe& kf) const;

  /// Smallest normalized distance over the pool; +inf when empty.
  double min_normalized_distance(const RigidTransform& pose) const;

  /// Indices of the k pose-nearest keyframes (ties broken by keyframe id).
  std::vector<int> nearest(const RigidTransform& pose, int k) const;

  /// Appends with the next strictly increasing id.
  void add(PointCloud cloud, const RigidTransform& pose, int frame_index);

  const std::vector<Keyframe>& keyframes() const { return keyframes_; }
  size_t size() const { return keyframes_.size(); }
  int query_size() const { return query_size_; }

 private:
  std::vector<Keyframe> keyframes_;
  double theta_key_rad_ = 0.0;
  double d_key_ = 0.0;
  int query_size_ = 3;
};

enum class TrackStatus { kTracking, kLost };

/// Per-object tracking state. The model frame is fixed to the camera frame of
/// the first observation, so the tracked pose is directly the relative motion
/// since registration.
struct TrackState {
  int32_t object_id = 0;
  PointCloud model_cloud;    // full-resolution masked back-projection of frame 0
  RigidTransform pose;       // model-to-camera, current frame
  KeyframeMemoryPool pool;
  TrackStatus status = TrackStatus::kTracking;
  int consecutive_failures = 0;

  // Registration target derived from model_cloud (downsampled, with normals).
  PointCloud model_target;
  KdTree3 model_tree;
  TrackerParams params;
};

/// Registers an object from its first observation. The mask must carry at
/// least params.min_mask_pixels pixels of object_id, else RegistrationError.
/// The first frame always becomes keyframe 0.
TrackState init_object(const ScanFrame& frame, int32_t object_id, const TrackerParams& params = {});

/// Tracks one frame: masked cloud -> ICP against the object model (falling
/// back to the pose-nearest keyframe when the first-frame view no longer
/// overlaps), then pool refinement, then keyframe admission. Returns false and
/// sets status = kLost when no registration reaches the inlier gate; the pose
/// is left at its previous value in that case.
bool track_frame(TrackState& state, const ScanFrame& frame);

/// Adds the current frame as a keyframe iff its pose is farther than the
/// rotation OR translation threshold from every pooled keyframe.
bool maybe_add_keyframe(TrackState& state, const ScanFrame& frame);

/// Re-estimates the current pose from ICP measurements against the K
/// pose-nearest keyframes: each registration votes with a full-pose candidate,
/// combined by Gauss-Newton minimization of inlier-weighted squared
/// log-residuals. When every registration fails the current pose is returned.
RigidTransform refine_with_pool(TrackState& state, const ScanFrame& frame);

/// Weighted left-invariant mean of pose candidates: geodesic (Karcher) mean of
/// the rotations and weighted mean of the translations. Zero-weight candidates
/// do not influence the result.
RigidTransform weighted_pose_mean(const std::vector<RigidTransform>& candidates,
                                  const std::vector<double>& weights, const RigidTransform& init);

}  // namespace scantrack
