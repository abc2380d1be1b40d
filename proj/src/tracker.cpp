#include "scantrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scantrack/cloud_ops.hpp"
#include "scantrack/errors.hpp"

namespace scantrack {

namespace {

/// Masked back-projection prepared for registration: downsampled, no normals
/// (per-frame clouds are always the ICP source).
PointCloud track_cloud(const ScanFrame& frame, int32_t object_id, const TrackerParams& params) {
  PointCloud cloud = backproject_object(frame.depth, frame.intr, frame.mask, object_id);
  if (cloud.empty()) return cloud;
  return voxel_downsample(cloud, params.track_voxel);
}

PointCloud with_normals(PointCloud cloud, int k) {
  if (cloud.size() >= static_cast<size_t>(k)) return estimate_normals(cloud, k);
  return cloud;
}

}  // namespace

KeyframeMemoryPool::KeyframeMemoryPool(double theta_key_deg, double d_key, int query_size)
    : theta_key_rad_(theta_key_deg * M_PI / 180.0), d_key_(d_key), query_size_(query_size) {}

double KeyframeMemoryPool::normalized_distance(const RigidTransform& pose,
                                               const Keyframe& kf) const {
  const double rot = rotation_angle_between(pose, kf.pose) / theta_key_rad_;
  const double trans = translation_distance(pose, kf.pose) / d_key_;
  return std::max(rot, trans);
}

double KeyframeMemoryPool::min_normalized_distance(const RigidTransform& pose) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& kf : keyframes_) best = std::min(best, normalized_distance(pose, kf));
  return best;
}

std::vector<int> KeyframeMemoryPool::nearest(const RigidTransform& pose, int k) const {
  std::vector<int> order(keyframes_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return normalized_distance(pose, keyframes_[a]) < normalized_distance(pose, keyframes_[b]);
  });
  if (static_cast<int>(order.size()) > k) order.resize(k);
  return order;
}

void KeyframeMemoryPool::add(PointCloud cloud, const RigidTransform& pose, int frame_index) {
  Keyframe kf;
  kf.id = keyframes_.empty() ? 0 : keyframes_.back().id + 1;
  kf.frame_index = frame_index;
  kf.object_cloud = std::move(cloud);
  kf.pose = pose;
  kf.tree.build(kf.object_cloud.positions);
  keyframes_.push_back(std::move(kf));
}

TrackState init_object(const ScanFrame& frame, int32_t object_id, const TrackerParams& params) {
  frame.validate();
  const size_t pixels = frame.mask.count(object_id);
  if (pixels < static_cast<size_t>(params.min_mask_pixels)) {
    throw RegistrationError("init_object: object " + std::to_string(object_id) + " has " +
                            std::to_string(pixels) + " mask pixels, need " +
                            std::to_string(params.min_mask_pixels));
  }

  TrackState state;
  state.object_id = object_id;
  state.params = params;
  state.model_cloud = backproject_object(frame.depth, frame.intr, frame.mask, object_id);
  state.pose = RigidTransform::identity();
  state.status = TrackStatus::kTracking;

  state.model_target =
      with_normals(voxel_downsample(state.model_cloud, params.track_voxel), params.normal_k);
  state.model_tree.build(state.model_target.positions);

  state.pool = KeyframeMemoryPool(params.theta_key_deg, params.d_key, params.pool_query_size);
  state.pool.add(state.model_target, RigidTransform::identity(), frame.index);
  return state;
}

RigidTransform weighted_pose_mean(const std::vector<RigidTransform>& candidates,
                                  const std::vector<double>& weights,
                                  const RigidTransform& init) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (candidates.empty() || total <= 0.0) return init;

  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < candidates.size(); ++i) {
    t += weights[i] * candidates[i].translation();
  }
  t /= total;

  Eigen::Matrix3d r = init.rotation();
  for (int iter = 0; iter < 32; ++iter) {
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      omega += weights[i] * so3_log(candidates[i].rotation() * r.transpose());
    }
    omega /= total;
    r = orthonormalized(so3_exp(omega) * r);
    if (omega.norm() < 1e-13) break;
  }
  return RigidTransform(r, t);
}

namespace {

RigidTransform refine_with_pool_impl(TrackState& state, const PointCloud& cloud) {
  const RigidTransform current = state.pose;
  if (state.pool.size() == 0 || cloud.size() < 10) return current;

  const auto nearest = state.pool.nearest(current, state.pool.query_size());
  std::vector<RigidTransform> candidates;
  std::vector<double> weights;
  for (int idx : nearest) {
    const Keyframe& kf = state.pool.keyframes()[idx];
    if (kf.object_cloud.size() < 10) continue;
    // The measurement maps the current camera frame into the keyframe's one.
    const RigidTransform init_rel = compose(kf.pose, invert(current));
    const IcpResult res =
        icp_register(cloud, kf.object_cloud, kf.tree, init_rel, state.params.icp);
    if (!res.succeeded) continue;
    candidates.push_back(compose(invert(res.transform), kf.pose));
    weights.push_back(res.inlier_fraction);
  }
  if (candidates.empty()) return current;  // degraded, keep the frame-to-frame pose
  return weighted_pose_mean(candidates, weights, current);
}

bool maybe_add_keyframe_impl(TrackState& state, const PointCloud& cloud, int frame_index) {
  if (state.pool.min_normalized_distance(state.pose) <= 1.0) return false;
  if (cloud.size() < 10) return false;
  state.pool.add(with_normals(cloud, state.params.normal_k), state.pose, frame_index);
  return true;
}

}  // namespace

RigidTransform refine_with_pool(TrackState& state, const ScanFrame& frame) {
  return refine_with_pool_impl(state, track_cloud(frame, state.object_id, state.params));
}

bool maybe_add_keyframe(TrackState& state, const ScanFrame& frame) {
  return maybe_add_keyframe_impl(state, track_cloud(frame, state.object_id, state.params),
                                 frame.index);
}

bool track_frame(TrackState& state, const ScanFrame& frame) {
  if (state.status != TrackStatus::kTracking) return false;

  const PointCloud cloud = track_cloud(frame, state.object_id, state.params);
  if (cloud.size() < 10) {
    state.status = TrackStatus::kLost;
    state.consecutive_failures++;
    return false;
  }

  // Constant-position motion model: the previous pose seeds the registration.
  bool registered = false;
  RigidTransform pose_est = state.pose;

  const IcpResult to_model =
      icp_register(cloud, state.model_target, state.model_tree, invert(state.pose),
                   state.params.icp);
  if (to_model.succeeded) {
    pose_est = invert(to_model.transform);
    registered = true;
  } else {
    // The first-frame view may no longer overlap the current one; the
    // pose-nearest keyframe shares the most surface by construction.
    const auto nearest = state.pool.nearest(state.pose, 1);
    if (!nearest.empty()) {
      const Keyframe& kf = state.pool.keyframes()[nearest[0]];
      if (kf.object_cloud.size() >= 10) {
        const RigidTransform init_rel = compose(kf.pose, invert(state.pose));
        const IcpResult to_kf =
            icp_register(cloud, kf.object_cloud, kf.tree, init_rel, state.params.icp);
        if (to_kf.succeeded) {
          pose_est = compose(invert(to_kf.transform), kf.pose);
          registered = true;
        }
      }
    }
  }

  if (!registered) {
    state.status = TrackStatus::kLost;
    state.consecutive_failures++;
    return false;
  }

  state.pose = pose_est;
  if (state.params.refine_with_pool) {
    state.pose = refine_with_pool_impl(state, cloud);
  }
  maybe_add_keyframe_impl(state, cloud, frame.index);
  state.consecutive_failures = 0;
  return true;
}

}  // namespace scantrack
