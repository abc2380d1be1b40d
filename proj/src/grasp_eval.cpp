#include "scantrack/grasp_eval.hpp"

#include <algorithm>
#include <cmath>

#include "scantrack/errors.hpp"
#include "scantrack/render.hpp"
#include "scantrack/tsdf.hpp"

namespace scantrack {

void EvalConfig::validate() const {
  if (mu_list.empty()) throw InvalidInputError("eval config: empty friction list");
  double prev = 0.0;
  for (double mu : mu_list) {
    if (!(mu > prev)) throw InvalidInputError("eval config: friction values must be positive ascending");
    prev = mu;
  }
  if (k_max < 1) throw InvalidInputError("eval config: k_max must be >= 1");
}

GtSceneContext::GtSceneContext(const SceneModel& scene, const GripperModel& gripper,
                               double sample_density, uint64_t seed)
    : gripper_(gripper), ground_plane_(scene.ground_plane) {
  gripper_.validate();
  scene.validate();
  bvh_ = build_scene_bvh(scene);
  for (const auto& obj : scene.objects) {
    PointCloud samples = mesh_to_cloud(transform_mesh(obj.mesh, obj.pose), sample_density,
                                       seed + static_cast<uint64_t>(obj.id));
    samples.labels.assign(samples.size(), obj.id);
    samples_.positions.insert(samples_.positions.end(), samples.positions.begin(),
                              samples.positions.end());
    samples_.normals.insert(samples_.normals.end(), samples.normals.begin(),
                            samples.normals.end());
    samples_.labels.insert(samples_.labels.end(), samples.labels.begin(), samples.labels.end());
  }
}

GtSceneContext::Profile GtSceneContext::profile(const GraspPose& grasp) const {
  Profile prof;

  // (a) gripper volume clear of the true surfaces; the ground half-space is
  // tested analytically against the palm/finger box corners.
  prof.collision_free = !collision_check(grasp, samples_, gripper_);
  if (prof.collision_free && ground_plane_) {
    const double half_w = grasp.width / 2.0;
    const double half_fd = gripper_.finger_depth / 2.0;
    const double half_th = gripper_.finger_thickness / 2.0;
    const double a_lo = -half_fd - gripper_.palm_depth;
    const double c_hi = half_w + gripper_.finger_thickness;
    for (int sa = 0; sa < 2; ++sa) {
      for (int sc = 0; sc < 2; ++sc) {
        for (int sf = 0; sf < 2; ++sf) {
          const Eigen::Vector3d corner((sa == 0) ? a_lo : half_fd, (sc == 0) ? -c_hi : c_hi,
                                       (sf == 0) ? -half_th : half_th);
          const Eigen::Vector3d world = grasp.rotation * corner + grasp.translation;
          if (world.z() < 0.0) {
            prof.collision_free = false;
            break;
          }
        }
      }
    }
  }

  // (b) two contacts on the same object, both inside the jaw.
  const Eigen::Vector3d c_axis = grasp.closing_axis();
  const double reach = grasp.width / 2.0 + 1e-3;
  const RayHit hit_pos = bvh_.raycast(grasp.translation, c_axis, 1e-9, reach);
  const RayHit hit_neg = bvh_.raycast(grasp.translation, -c_axis, 1e-9, reach);
  if (hit_pos.hit && hit_neg.hit && hit_pos.object_id == hit_neg.object_id &&
      (hit_pos.point - hit_neg.point).norm() <= grasp.width + 1e-9) {
    prof.contacts_ok = true;
    // (c) worst deviation of the contact normals from the closing line.
    const double a1 = std::acos(std::clamp(std::abs(hit_pos.normal.dot(c_axis)), 0.0, 1.0));
    const double a2 = std::acos(std::clamp(std::abs(hit_neg.normal.dot(c_axis)), 0.0, 1.0));
    prof.contact_angle = std::max(a1, a2);
  }
  return prof;
}

bool GtSceneContext::evaluate(const GraspPose& grasp, double mu) const {
  if (!(mu > 0.0)) return false;
  const Profile prof = profile(grasp);
  return prof.collision_free && prof.contacts_ok && prof.contact_angle <= std::atan(mu) + 1e-12;
}

bool evaluate_grasp(const GraspPose& grasp, const SceneModel& gt_scene,
                    const GripperModel& gripper, double mu) {
  return GtSceneContext(gt_scene, gripper).evaluate(grasp, mu);
}

namespace {

std::vector<GtSceneContext::Profile> top_profiles(const GraspSet& grasps,
                                                  const GtSceneContext& gt, int k_max) {
  const size_t n = std::min<size_t>(grasps.size(), static_cast<size_t>(k_max));
  std::vector<GtSceneContext::Profile> profiles(n);
  for (size_t i = 0; i < n; ++i) profiles[i] = gt.profile(grasps.grasps[i]);
  return profiles;
}

double precision_from_profiles(const std::vector<GtSceneContext::Profile>& profiles, double mu,
                               int k) {
  const double cone = std::atan(mu) + 1e-12;
  int successes = 0;
  const int upto = std::min<int>(k, static_cast<int>(profiles.size()));
  for (int i = 0; i < upto; ++i) {
    const auto& p = profiles[i];
    if (p.collision_free && p.contacts_ok && p.contact_angle <= cone) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(k);
}

}  // namespace

double precision_at_k(const GraspSet& grasps, const GtSceneContext& gt, double mu, int k) {
  if (k < 1) throw InvalidInputError("precision_at_k: k must be >= 1");
  return precision_from_profiles(top_profiles(grasps, gt, k), mu, k);
}

double ap_mu(const GraspSet& grasps, const GtSceneContext& gt, double mu, int k_max) {
  const auto profiles = top_profiles(grasps, gt, k_max);
  double sum = 0.0;
  for (int k = 1; k <= k_max; ++k) sum += precision_from_profiles(profiles, mu, k);
  return sum / k_max;
}

double ApReport::ap_at(double mu, const EvalConfig& cfg) const {
  for (size_t i = 0; i < cfg.mu_list.size(); ++i) {
    if (std::abs(cfg.mu_list[i] - mu) < 1e-9) return per_mu[i];
  }
  throw InvalidInputError("ApReport: friction value not in the evaluated list");
}

ApReport ap(const GraspSet& grasps, const GtSceneContext& gt, const EvalConfig& cfg) {
  cfg.validate();
  const auto profiles = top_profiles(grasps, gt, cfg.k_max);

  ApReport report;
  report.per_mu.reserve(cfg.mu_list.size());
  for (double mu : cfg.mu_list) {
    std::vector<double> per_k(cfg.k_max);
    double sum = 0.0;
    for (int k = 1; k <= cfg.k_max; ++k) {
      per_k[k - 1] = precision_from_profiles(profiles, mu, k);
      sum += per_k[k - 1];
    }
    report.per_mu.push_back(sum / cfg.k_max);
    report.precision.push_back(std::move(per_k));
  }
  double total = 0.0;
  for (double v : report.per_mu) total += v;
  report.ap = total / static_cast<double>(report.per_mu.size());
  return report;
}

}  // namespace scantrack
