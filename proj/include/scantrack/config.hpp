#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scantrack/camera.hpp"
#include "scantrack/grasp.hpp"
#include "scantrack/grasp_eval.hpp"
#include "scantrack/render.hpp"
#include "scantrack/tracker.hpp"

namespace scantrack {

enum class MaskSource { kOracle, kPropagated };

/// Every knob of the pipeline in one flat, file-round-trippable bag.
/// The text form is "key = value", one per line, '#' comments.
struct PipelineConfig {
  CameraIntrinsics camera{277.0, 277.0, 160.0, 120.0, 320, 240};
  TrajectoryParams trajectory;
  RenderOptions render;

  TrackerParams tracker;
  int max_lost_frames = 5;  // consecutive failures before an object is dropped

  double tsdf_voxel_size = 0.005;
  double tsdf_trunc = 0.015;
  double tsdf_padding = 0.02;

  double mesh_sample_density = 2.0e5;  // points per square meter
  double merge_dedup_rho = 0.003;
  double fully_visible_rho = 0.003;

  GripperModel gripper;
  GraspSamplerParams grasp;
  EvalConfig eval;
  double gt_sample_density = 2.0e5;
  int eval_frame = -1;  // frame index used for evaluation; -1 = last

  MaskSource mask_source = MaskSource::kOracle;
  bool parallel_objects = true;
  uint64_t seed = 1;

  // Benchmark shape.
  int bench_scan_views = 32;
  int bench_frames = 20;
  int bench_warmup_frames = 3;

  void validate() const;
};

/// Serialization is exact: doubles are written with round-trip precision, so
/// parse(serialize(cfg)) reproduces cfg bit-for-bit.
std::string serialize_config(const PipelineConfig& cfg);
PipelineConfig parse_config(const std::string& text);

void write_config(const std::string& path, const PipelineConfig& cfg);
PipelineConfig read_config(const std::string& path);

/// FNV-1a digest of the canonical serialization; recorded in run manifests.
uint64_t config_hash(const PipelineConfig& cfg);

}  // namespace scantrack
