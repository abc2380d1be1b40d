#pragma once

#include <cstdint>
#include <vector>

#include "scantrack/assembler.hpp"
#include "scantrack/point_cloud.hpp"

namespace scantrack {

/// Parallel-jaw gripper geometry. The grasp frame origin sits between the
/// fingertips; the approach axis points from the palm toward the fingers.
struct GripperModel {
  double max_width = 0.08;        // jaw opening, meters
  double finger_depth = 0.04;     // finger length along the approach axis
  double finger_thickness = 0.01; // finger cross-section
  double palm_depth = 0.02;

  void validate() const;
};

/// 6-DoF grasp: rotation columns = (approach, closing, finger) axes.
struct GraspPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();  // grasp center
  double width = 0.0;   // jaw opening for this grasp
  double score = 0.0;   // confidence in [0, 1]

  Eigen::Vector3d approach_axis() const { return rotation.col(0); }
  Eigen::Vector3d closing_axis() const { return rotation.col(1); }
  Eigen::Vector3d finger_axis() const { return rotation.col(2); }

  /// Validates the rotation and 0 <= width <= max_width.
  void validate(const GripperModel& gripper) const;

  /// Stable 64-bit digest of the quantized pose; the deterministic tie-break
  /// for equal scores.
  uint64_t hash() const;
};

/// Score-descending, deterministically ordered grasp list.
struct GraspSet {
  std::vector<GraspPose> grasps;

  size_t size() const { return grasps.size(); }
  bool empty() const { return grasps.empty(); }

  /// Sorts by (score desc, hash asc) and truncates to n_keep (<=0: keep all).
  void sort_and_truncate(int n_keep);
};

struct GraspSamplerParams {
  double antipodal_angle_deg = 30.0;  // generation-time tolerance
  double clearance = 0.005;           // added to each side of the jaw width
  double pair_cylinder_radius = 0.005;
  int max_seeds = 2000;               // deterministic stride subsample cap
  int n_keep = 200;
  int normal_k = 16;
  Eigen::Vector3d view_origin = Eigen::Vector3d::Zero();  // camera position in cloud frame
};

/// Antipodal grasp synthesis on a completed scene cloud. For each seed point,
/// a partner is sought in a thin cylinder cast along the inward surface
/// normal; pairs within the antipodal cone on both ends become grasps with
/// the closing axis through the pair, the approach axis the most
/// view-aligned perpendicular, and score 1 - max(angle)/tolerance. Colliding
/// grasps are rejected against the same cloud. Needs >= 100 points; normals
/// are estimated when absent. An empty result is a valid outcome.
GraspSet sample_grasps(const MergedScene& scene, const GripperModel& gripper,
                       const GraspSamplerParams& params = {});

/// True iff any scene point falls inside the gripper's swept volume: two
/// finger boxes flanking the jaw plus the palm block behind them. Points
/// between the fingers (the grasped material) are exempt by construction.
bool collision_check(const GraspPose& grasp, const PointCloud& scene, const GripperModel& gripper);

/// Grasp list file: "score width tx ty tz r00..r22" per line, 6 decimals.
void write_grasps(const std::string& path, const GraspSet& grasps);
GraspSet read_grasps(const std::string& path);

}  // namespace scantrack
