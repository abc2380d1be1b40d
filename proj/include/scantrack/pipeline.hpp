#pragma once

#include <map>
#include <string>
#include <vector>

#include "scantrack/assembler.hpp"
#include "scantrack/config.hpp"
#include "scantrack/grasp_eval.hpp"
#include "scantrack/tsdf.hpp"

namespace scantrack {

enum class PipelineMode { kStage1, kStage2 };

/// The only sanctioned path to TSDF integration. Reconstruction is frozen
/// outside the scan stage; a stage-2 integrate call is a contract violation
/// and throws std::logic_error.
class FusionGuard {
 public:
  explicit FusionGuard(PipelineMode mode) : mode_(mode) {}

  void integrate(TsdfVolume& volume, const ScanFrame& frame, int32_t object_id,
                 const RigidTransform& pose);

  int integration_count() const { return count_; }
  PipelineMode mode() const { return mode_; }

 private:
  PipelineMode mode_;
  int count_ = 0;
};

/// Wall-clock breakdown for one processed frame, milliseconds.
struct TimingRow {
  int frame_index = 0;
  double segmentation_ms = 0.0;  // oracle lookup or mask propagation
  double tracking_ms = 0.0;      // all objects
  std::map<int32_t, double> tracking_per_object_ms;
  double assembly_ms = 0.0;      // reconstruction placement + merge
  double grasp_ms = 0.0;
  double total_ms = 0.0;
};

struct TimingReport {
  std::vector<TimingRow> rows;
  int warmup_frames = 0;  // rows excluded from the means

  TimingRow mean() const;  // over rows past the warmup
};

/// Scan stage: registers every object labeled in init_mask, tracks it through
/// all frames, fuses its TSDF at keyframe-accepted poses and extracts the
/// mesh. Objects that fail registration or stay lost for more than
/// cfg.max_lost_frames consecutive frames are marked lost with a diagnostic;
/// the run itself never aborts. out_dir (optional) receives the persisted
/// registry plus a manifest.
ObjectRegistry run_stage1(const std::vector<ScanFrame>& frames, const InstanceMask& init_mask,
                          const PipelineConfig& cfg, const std::string& out_dir = {},
                          std::vector<std::string>* warnings = nullptr);

struct Stage2Output {
  MergedScene merged;
  GraspSet grasps;
  TimingRow timing;
  InstanceMask mask_used;
};

/// Per-frame tracking/completion/grasping with reconstruction frozen.
/// Tracking failures degrade the object to partial-only coverage for the
/// frame; objects recover unless the failure streak passes max_lost_frames.
class Stage2Session {
 public:
  Stage2Session(ObjectRegistry registry, const PipelineConfig& cfg);

  Stage2Output process_frame(const ScanFrame& frame);

  const ObjectRegistry& registry() const { return registry_; }
  ObjectRegistry& registry() { return registry_; }
  const FusionGuard& fusion_guard() const { return guard_; }
  FusionGuard& fusion_guard() { return guard_; }

  /// Current model-to-camera poses of live objects.
  std::map<int32_t, RigidTransform> poses() const;

 private:
  ObjectRegistry registry_;
  PipelineConfig cfg_;
  FusionGuard guard_{PipelineMode::kStage2};
};

/// Mask predicted by rendering the registered meshes at their tracked poses
/// (camera frame). No ground-truth labels are consulted.
InstanceMask propagate_mask(const ObjectRegistry& registry,
                            const std::map<int32_t, RigidTransform>& poses,
                            const CameraIntrinsics& intr);

struct ExperimentRow {
  std::string input;  // partial / merged / fully_visible
  double coverage = 0.0;
  double ap = 0.0;
  double ap_04 = 0.0;
  double ap_08 = 0.0;
  int grasp_count = 0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  TimingReport timing;
  int eval_frame = 0;
  double stage1_seconds = 0.0;

  const ExperimentRow& row(const std::string& input) const;
};

/// End-to-end comparison on one scene: scan + register, then evaluate grasp
/// quality on the partial, completed, and fully-visible inputs of the
/// evaluation frame. Writes report.json / report.txt, grasp lists and merged
/// clouds under out_dir when given.
ExperimentReport run_experiment(const SceneModel& scene, const PipelineConfig& cfg,
                                const std::string& out_dir = {});

struct BenchRow {
  int object_count = 0;
  bool parallel = false;
  double segmentation_ms = 0.0;
  double tracking_ms = 0.0;
  double assembly_ms = 0.0;
  double grasp_ms = 0.0;
  double total_ms = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double fit_per_object_ms = 0.0;  // a in total = a*M + b, sequential rows
  double fit_base_ms = 0.0;        // b
  double fit_r_squared = 0.0;
  int hardware_threads = 1;

  const BenchRow& row(int object_count, bool parallel) const;
};

/// Per-frame stage-2 cost for 1/2/4 objects, sequential vs parallel object
/// tracking, with warmup frames excluded and an affine fit of the sequential
/// totals against the object count.
BenchReport bench(const PipelineConfig& cfg, const std::string& out_dir = {});

void write_experiment_report(const std::string& dir, const ExperimentReport& report,
                             const PipelineConfig& cfg);
void write_bench_report(const std::string& dir, const BenchReport& report);

/// manifest.txt: config hash plus a sorted file inventory of the run directory.
void write_manifest(const std::string& dir, const PipelineConfig& cfg);

}  // namespace scantrack
