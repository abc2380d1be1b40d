#pragma once

#include <vector>

#include "scantrack/bvh.hpp"
#include "scantrack/grasp.hpp"
#include "scantrack/scene.hpp"

namespace scantrack {

struct EvalConfig {
  std::vector<double> mu_list = {0.2, 0.4, 0.6, 0.8, 1.0, 1.2};
  int k_max = 50;

  void validate() const;  // mu positive ascending, k_max >= 1
};

/// Ground-truth evaluation context: the scene's posed meshes (ray casting for
/// contacts), dense surface samples (collision), and the ground flag. Built
/// from ground-truth geometry only, never from reconstructed data.
class GtSceneContext {
 public:
  GtSceneContext(const SceneModel& scene, const GripperModel& gripper,
                 double sample_density = 2.0e5, uint64_t seed = 7);

  const GripperModel& gripper() const { return gripper_; }
  const PointCloud& surface_samples() const { return samples_; }

  /// Per-grasp physical profile, independent of the friction coefficient.
  struct Profile {
    bool collision_free = false;
    bool contacts_ok = false;      // two same-object contacts inside the jaw
    double contact_angle = M_PI;   // worst angle(normal, closing line)
  };
  Profile profile(const GraspPose& grasp) const;

  /// Antipodal force-closure test at friction mu:
  ///   collision-free AND two same-object contacts AND both contact normals
  ///   within atan(mu) of the closing line.
  bool evaluate(const GraspPose& grasp, double mu) const;

 private:
  GripperModel gripper_;
  TriangleBvh bvh_;
  PointCloud samples_;
  bool ground_plane_ = false;
};

/// Convenience wrapper matching the one-shot contract; builds the context
/// per call. Batch users should reuse a GtSceneContext.
bool evaluate_grasp(const GraspPose& grasp, const SceneModel& gt_scene,
                    const GripperModel& gripper, double mu);

/// Successes among the top-min(k, |grasps|) divided by k: grasps beyond the
/// set count as failures.
double precision_at_k(const GraspSet& grasps, const GtSceneContext& gt, double mu, int k);

/// Mean of precision_at_k over k = 1..k_max.
double ap_mu(const GraspSet& grasps, const GtSceneContext& gt, double mu, int k_max = 50);

struct ApReport {
  double ap = 0.0;
  std::vector<double> per_mu;                    // aligned with cfg.mu_list
  std::vector<std::vector<double>> precision;    // [mu][k-1]
  double ap_at(double mu, const EvalConfig& cfg) const;
};

/// AP = mean of ap_mu over cfg.mu_list, with the per-mu and per-k breakdown.
ApReport ap(const GraspSet& grasps, const GtSceneContext& gt, const EvalConfig& cfg);

}  // namespace scantrack
