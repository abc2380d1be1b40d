#include "scantrack/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "scantrack/cloud_ops.hpp"
#include "scantrack/errors.hpp"
#include "scantrack/io.hpp"
#include "scantrack/kdtree.hpp"
#include "scantrack/parallel.hpp"
#include "scantrack/primitives.hpp"
#include "scantrack/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace scantrack {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Full-depth back-projection keeping the mask id of every pixel (0 for
/// background), prepared for merging: downsampled, normals toward the camera.
PointCloud make_partial_cloud(const ScanFrame& frame, const PipelineConfig& cfg) {
  PointCloud cloud;
  const CameraIntrinsics& intr = frame.intr;
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const double d = frame.depth.at(u, v);
      if (d <= 0.0) continue;
      cloud.positions.emplace_back((u - intr.cx) * d / intr.fx, (v - intr.cy) * d / intr.fy, d);
      cloud.labels.push_back(frame.mask.at(u, v));
    }
  }
  if (cloud.empty()) return cloud;
  cloud = voxel_downsample(cloud, cfg.merge_dedup_rho);
  if (cloud.size() >= static_cast<size_t>(cfg.tracker.normal_k)) {
    cloud = estimate_normals(cloud, cfg.tracker.normal_k);
  }
  return cloud;
}

}  // namespace

void FusionGuard::integrate(TsdfVolume& volume, const ScanFrame& frame, int32_t object_id,
                            const RigidTransform& pose) {
  if (mode_ != PipelineMode::kStage1) {
    throw std::logic_error("FusionGuard: reconstruction is frozen outside the scan stage");
  }
  volume.integrate(frame, object_id, pose);
  ++count_;
}

TimingRow TimingReport::mean() const {
  TimingRow out;
  int n = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(i) < warmup_frames) continue;
    const TimingRow& row = rows[i];
    out.segmentation_ms += row.segmentation_ms;
    out.tracking_ms += row.tracking_ms;
    out.assembly_ms += row.assembly_ms;
    out.grasp_ms += row.grasp_ms;
    out.total_ms += row.total_ms;
    for (const auto& [id, t] : row.tracking_per_object_ms) out.tracking_per_object_ms[id] += t;
    ++n;
  }
  if (n == 0) return out;
  out.segmentation_ms /= n;
  out.tracking_ms /= n;
  out.assembly_ms /= n;
  out.grasp_ms /= n;
  out.total_ms /= n;
  for (auto& [id, t] : out.tracking_per_object_ms) t /= n;
  return out;
}

ObjectRegistry run_stage1(const std::vector<ScanFrame>& frames, const InstanceMask& init_mask,
                          const PipelineConfig& cfg, const std::string& out_dir,
                          std::vector<std::string>* warnings) {
  if (frames.empty()) throw InvalidInputError("run_stage1: no frames");
  cfg.validate();

  ScanFrame frame0 = frames[0];
  frame0.mask = init_mask;
  frame0.validate();

  std::set<int32_t> ids;
  for (int32_t label : init_mask.labels()) {
    if (label > 0) ids.insert(label);
  }

  std::vector<int32_t> id_list(ids.begin(), ids.end());
  std::vector<RegisteredObject> objects(id_list.size());
  std::vector<std::vector<std::string>> object_warnings(id_list.size());

  auto process_object = [&](size_t oi) {
    const int32_t id = id_list[oi];
    RegisteredObject& obj = objects[oi];
    obj.id = id;

    FusionGuard guard(PipelineMode::kStage1);
    try {
      obj.track = init_object(frame0, id, cfg.tracker);
    } catch (const RegistrationError& e) {
      obj.lost = true;
      obj.diagnostic = e.what();
      object_warnings[oi].push_back("object " + std::to_string(id) + " failed registration: " +
                                    e.what());
      return;
    }

    TsdfVolume volume =
        create_volume(obj.track.model_cloud, cfg.tsdf_voxel_size, cfg.tsdf_trunc, cfg.tsdf_padding);
    guard.integrate(volume, frame0, id, RigidTransform::identity());
    obj.trajectory.push_back({frame0.index, id, RigidTransform::identity()});

    for (size_t f = 1; f < frames.size(); ++f) {
      const size_t pool_before = obj.track.pool.size();
      if (track_frame(obj.track, frames[f])) {
        obj.trajectory.push_back({frames[f].index, id, obj.track.pose});
        if (obj.track.pool.size() > pool_before) {
          guard.integrate(volume, frames[f], id, obj.track.pose);
        }
      } else {
        if (obj.track.consecutive_failures > cfg.max_lost_frames) {
          obj.lost = true;
          obj.diagnostic = "lost after " + std::to_string(obj.track.consecutive_failures) +
                           " consecutive failures at frame " + std::to_string(frames[f].index);
          object_warnings[oi].push_back("object " + std::to_string(id) + " " + obj.diagnostic);
          return;
        }
        obj.track.status = TrackStatus::kTracking;  // retry from the previous pose
      }
    }

    try {
      obj.mesh = extract_mesh(volume);
      obj.sampled_cloud =
          mesh_to_cloud(obj.mesh, cfg.mesh_sample_density, cfg.seed + static_cast<uint64_t>(id));
    } catch (const EmptyMeshError& e) {
      obj.lost = true;
      obj.diagnostic = e.what();
      object_warnings[oi].push_back("object " + std::to_string(id) +
                                    " produced no surface: " + e.what());
    }
  };

  if (cfg.parallel_objects) {
    parallel_for(id_list.size(), process_object);
  } else {
    for (size_t i = 0; i < id_list.size(); ++i) process_object(i);
  }

  ObjectRegistry registry;
  for (auto& obj : objects) registry.objects.push_back(std::move(obj));
  if (warnings) {
    for (const auto& list : object_warnings) {
      warnings->insert(warnings->end(), list.begin(), list.end());
    }
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    save_registry(out_dir, registry);
    write_config((fs::path(out_dir) / "config.cfg").string(), cfg);
    write_manifest(out_dir, cfg);
  }
  return registry;
}

Stage2Session::Stage2Session(ObjectRegistry registry, const PipelineConfig& cfg)
    : registry_(std::move(registry)), cfg_(cfg) {
  cfg_.validate();
}

std::map<int32_t, RigidTransform> Stage2Session::poses() const {
  std::map<int32_t, RigidTransform> out;
  for (const auto& obj : registry_.objects) {
    if (!obj.lost) out[obj.id] = obj.track.pose;
  }
  return out;
}

Stage2Output Stage2Session::process_frame(const ScanFrame& frame) {
  Stage2Output out;
  const auto t_frame = Clock::now();

  // Segmentation: ground-truth lookup or geometric propagation.
  auto t0 = Clock::now();
  InstanceMask mask = cfg_.mask_source == MaskSource::kOracle
                          ? frame.mask
                          : propagate_mask(registry_, poses(), frame.intr);
  out.timing.segmentation_ms = ms_since(t0);
  out.mask_used = mask;

  ScanFrame tracked_frame = frame;
  tracked_frame.mask = mask;

  // Tracking; objects are independent and may run on parallel workers.
  std::vector<RegisteredObject*> live;
  for (auto& obj : registry_.objects) {
    if (!obj.lost) live.push_back(&obj);
  }
  std::vector<double> track_ms(live.size(), 0.0);
  std::vector<bool> tracked(live.size(), false);

  t0 = Clock::now();
  auto track_one = [&](size_t i) {
    const auto t_obj = Clock::now();
    RegisteredObject& obj = *live[i];
    if (track_frame(obj.track, tracked_frame)) {
      tracked[i] = true;
    } else if (obj.track.consecutive_failures > cfg_.max_lost_frames) {
      obj.lost = true;
      obj.diagnostic = "lost in tracking stage at frame " + std::to_string(frame.index);
    } else {
      obj.track.status = TrackStatus::kTracking;  // retry next frame
    }
    track_ms[i] = ms_since(t_obj);
  };
  if (cfg_.parallel_objects) {
    parallel_for(live.size(), track_one);
  } else {
    for (size_t i = 0; i < live.size(); ++i) track_one(i);
  }
  out.timing.tracking_ms = ms_since(t0);
  for (size_t i = 0; i < live.size(); ++i) {
    out.timing.tracking_per_object_ms[live[i]->id] = track_ms[i];
  }

  // Scene completion. Only objects tracked in this frame contribute;
  // reconstruction itself stays frozen (no integration path exists here).
  t0 = Clock::now();
  std::map<int32_t, RigidTransform> frame_poses;
  for (size_t i = 0; i < live.size(); ++i) {
    if (tracked[i]) frame_poses[live[i]->id] = live[i]->track.pose;
  }
  const PointCloud partial = make_partial_cloud(frame, cfg_);
  const std::vector<PointCloud> objects = reconstruct_objects(registry_, frame_poses);
  out.merged = merge_scene(partial, objects, cfg_.merge_dedup_rho, frame.index);
  out.timing.assembly_ms = ms_since(t0);

  // Grasp synthesis on the completed cloud.
  t0 = Clock::now();
  GraspSamplerParams grasp_params = cfg_.grasp;
  grasp_params.view_origin = Eigen::Vector3d::Zero();  // camera frame
  out.grasps = sample_grasps(out.merged, cfg_.gripper, grasp_params);
  out.timing.grasp_ms = ms_since(t0);

  out.timing.frame_index = frame.index;
  out.timing.total_ms = ms_since(t_frame);
  return out;
}

InstanceMask propagate_mask(const ObjectRegistry& registry,
                            const std::map<int32_t, RigidTransform>& poses,
                            const CameraIntrinsics& intr) {
  intr.validate();
  TriangleBvh bvh;
  for (const auto& obj : registry.objects) {
    if (obj.lost || obj.mesh.empty()) continue;
    const auto it = poses.find(obj.id);
    if (it == poses.end()) continue;
    bvh.add_mesh(transform_mesh(obj.mesh, it->second), obj.id);
  }
  bvh.build();

  InstanceMask mask(intr.width, intr.height, 0);
  parallel_for(static_cast<size_t>(intr.height), [&](size_t row) {
    const int v = static_cast<int>(row);
    for (int u = 0; u < intr.width; ++u) {
      const Eigen::Vector3d dir((u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0);
      const RayHit hit = bvh.raycast(Eigen::Vector3d::Zero(), dir);
      if (hit.hit) mask.at(u, v) = hit.object_id;
    }
  });
  return mask;
}

const ExperimentRow& ExperimentReport::row(const std::string& input) const {
  for (const auto& r : rows) {
    if (r.input == input) return r;
  }
  throw InvalidInputError("experiment report: no row for input " + input);
}

namespace {

double coverage_fraction(const PointCloud& gt_samples, const PointCloud& cloud, double radius) {
  if (gt_samples.empty() || cloud.empty()) return 0.0;
  const KdTree3 tree(cloud.positions);
  const double r_sq = radius * radius;
  size_t covered = 0;
  for (const auto& p : gt_samples.positions) {
    double sq = 0.0;
    if (tree.nearest(p, &sq) >= 0 && sq <= r_sq) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(gt_samples.size());
}

GraspSet grasps_to_world(const GraspSet& grasps, const RigidTransform& cam_pose) {
  GraspSet out = grasps;
  for (auto& g : out.grasps) {
    g.rotation = orthonormalized(cam_pose.rotation() * g.rotation);
    g.translation = cam_pose.apply(g.translation);
  }
  return out;
}

ExperimentRow evaluate_input(const std::string& name, const MergedScene& scene_cloud,
                             const GraspSet& grasps, const RigidTransform& cam_pose,
                             const GtSceneContext& gt, const PointCloud& gt_samples,
                             const PipelineConfig& cfg) {
  ExperimentRow row;
  row.input = name;
  row.grasp_count = static_cast<int>(grasps.size());
  const PointCloud world_cloud = transform_cloud(scene_cloud.cloud, cam_pose);
  row.coverage = coverage_fraction(gt_samples, world_cloud, 2.0 * cfg.merge_dedup_rho);
  const ApReport report = ap(grasps_to_world(grasps, cam_pose), gt, cfg.eval);
  row.ap = report.ap;
  row.ap_04 = report.ap_at(0.4, cfg.eval);
  row.ap_08 = report.ap_at(0.8, cfg.eval);
  return row;
}

}  // namespace

ExperimentReport run_experiment(const SceneModel& scene, const PipelineConfig& cfg,
                                const std::string& out_dir) {
  cfg.validate();
  scene.validate();
  if (!out_dir.empty()) fs::create_directories(out_dir);

  const auto trajectory = hemisphere_trajectory(cfg.trajectory);
  const TriangleBvh scene_bvh = build_scene_bvh(scene);
  std::vector<ScanFrame> frames;
  frames.reserve(trajectory.size());
  RenderOptions render_opts = cfg.render;
  render_opts.noise_seed = cfg.seed;
  for (size_t i = 0; i < trajectory.size(); ++i) {
    frames.push_back(render_frame(scene, scene_bvh, trajectory[i], cfg.camera,
                                  static_cast<int>(i), render_opts));
  }

  ExperimentReport report;
  std::vector<std::string> warnings;
  const auto t_stage1 = Clock::now();
  ObjectRegistry registry =
      run_stage1(frames, frames[0].mask, cfg,
                 out_dir.empty() ? std::string() : (fs::path(out_dir) / "registry").string(),
                 &warnings);
  report.stage1_seconds = ms_since(t_stage1) / 1000.0;

  const size_t eval_idx =
      cfg.eval_frame < 0 ? frames.size() - 1
                         : std::min<size_t>(cfg.eval_frame, frames.size() - 1);
  const ScanFrame& eval_frame = frames[eval_idx];
  report.eval_frame = eval_frame.index;

  // Completed input from the live pipeline.
  Stage2Session session(std::move(registry), cfg);
  Stage2Output stage2 = session.process_frame(eval_frame);
  report.timing.rows.push_back(stage2.timing);

  // Partial input: the same observed cloud without any completion.
  const PointCloud partial_pre = make_partial_cloud(eval_frame, cfg);
  const MergedScene partial_scene =
      merge_scene(partial_pre, {}, cfg.merge_dedup_rho, eval_frame.index);

  // Fully-visible input: the observed cloud completed with the union of
  // ground-truth-visible object surfaces from every scan view.
  const PointCloud fully_world =
      fully_visible_cloud(scene, trajectory, cfg.camera, cfg.fully_visible_rho);
  const PointCloud fully_cam = transform_cloud(fully_world, invert(eval_frame.cam_pose));
  const MergedScene fully_scene =
      merge_scene(partial_pre, {fully_cam}, cfg.merge_dedup_rho, eval_frame.index);

  GraspSamplerParams grasp_params = cfg.grasp;
  grasp_params.view_origin = Eigen::Vector3d::Zero();
  const GraspSet grasps_partial = sample_grasps(partial_scene, cfg.gripper, grasp_params);
  const GraspSet grasps_fully = sample_grasps(fully_scene, cfg.gripper, grasp_params);

  const GtSceneContext gt(scene, cfg.gripper, cfg.gt_sample_density, cfg.seed);
  report.rows.push_back(evaluate_input("partial", partial_scene, grasps_partial,
                                       eval_frame.cam_pose, gt, gt.surface_samples(), cfg));
  report.rows.push_back(evaluate_input("merged", stage2.merged, stage2.grasps,
                                       eval_frame.cam_pose, gt, gt.surface_samples(), cfg));
  report.rows.push_back(evaluate_input("fully_visible", fully_scene, grasps_fully,
                                       eval_frame.cam_pose, gt, gt.surface_samples(), cfg));

  if (!out_dir.empty()) {
    write_merged_scene((fs::path(out_dir) / "partial.ply").string(), partial_scene);
    write_merged_scene((fs::path(out_dir) / "merged.ply").string(), stage2.merged);
    write_merged_scene((fs::path(out_dir) / "fully_visible.ply").string(), fully_scene);
    write_grasps((fs::path(out_dir) / "grasps_partial.txt").string(), grasps_partial);
    write_grasps((fs::path(out_dir) / "grasps_merged.txt").string(), stage2.grasps);
    write_grasps((fs::path(out_dir) / "grasps_fully_visible.txt").string(), grasps_fully);
    if (!warnings.empty()) {
      std::ofstream warn_out(fs::path(out_dir) / "warnings.txt");
      for (const auto& w : warnings) warn_out << w << '\n';
    }
    write_experiment_report(out_dir, report, cfg);
    write_manifest(out_dir, cfg);
  }
  return report;
}

const BenchRow& BenchReport::row(int object_count, bool parallel) const {
  for (const auto& r : rows) {
    if (r.object_count == object_count && r.parallel == parallel) return r;
  }
  throw InvalidInputError("bench report: missing row");
}

BenchReport bench(const PipelineConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  BenchReport report;
  report.hardware_threads = hardware_threads();

  std::vector<double> seq_m, seq_t;
  for (const int object_count : {1, 2, 4}) {
    SceneModel scene;
    for (int i = 0; i < object_count; ++i) {
      SceneObject obj;
      obj.id = i + 1;
      const double sx = 0.05 + 0.01 * (i % 3);
      obj.mesh = make_box(sx, 0.05, 0.06 + 0.01 * (i % 2));
      obj.pose = RigidTransform::translate(
          Eigen::Vector3d(-0.12 + 0.09 * i, 0.05 * ((i % 2) ? 1 : -1), 0.035));
      obj.description = "bench box";
      scene.objects.push_back(std::move(obj));
    }

    PipelineConfig run_cfg = cfg;
    run_cfg.trajectory.n_azimuth = std::max(1, cfg.bench_scan_views / 4);
    run_cfg.trajectory.n_elevation = 4;

    const auto trajectory = hemisphere_trajectory(run_cfg.trajectory);
    const TriangleBvh scene_bvh = build_scene_bvh(scene);
    std::vector<ScanFrame> frames;
    for (size_t i = 0; i < trajectory.size(); ++i) {
      frames.push_back(
          render_frame(scene, scene_bvh, trajectory[i], run_cfg.camera, static_cast<int>(i)));
    }
    const ObjectRegistry registry = run_stage1(frames, frames[0].mask, run_cfg);

    // Stage-2 feed: cycle the tail of the scan so inter-frame motion stays
    // realistic for the tracker.
    const int n_feed = run_cfg.bench_warmup_frames + run_cfg.bench_frames;
    std::vector<ScanFrame> feed;
    const size_t tail = std::min<size_t>(8, frames.size());
    for (int i = 0; i < n_feed; ++i) {
      ScanFrame f = frames[frames.size() - tail + (i % tail)];
      f.index = static_cast<int>(frames.size()) + i;
      feed.push_back(std::move(f));
    }

    for (const bool parallel : {false, true}) {
      PipelineConfig mode_cfg = run_cfg;
      mode_cfg.parallel_objects = parallel;
      Stage2Session session(registry, mode_cfg);
      TimingReport timing;
      timing.warmup_frames = run_cfg.bench_warmup_frames;
      for (const auto& frame : feed) {
        timing.rows.push_back(session.process_frame(frame).timing);
      }
      const TimingRow mean = timing.mean();
      BenchRow row;
      row.object_count = object_count;
      row.parallel = parallel;
      row.segmentation_ms = mean.segmentation_ms;
      row.tracking_ms = mean.tracking_ms;
      row.assembly_ms = mean.assembly_ms;
      row.grasp_ms = mean.grasp_ms;
      row.total_ms = mean.total_ms;
      report.rows.push_back(row);
      if (!parallel) {
        seq_m.push_back(object_count);
        seq_t.push_back(mean.total_ms);
      }
    }
  }

  // Affine fit total = a*M + b over the sequential rows.
  const size_t n = seq_m.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += seq_m[i];
    my += seq_t[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (seq_m[i] - mx) * (seq_m[i] - mx);
    sxy += (seq_m[i] - mx) * (seq_t[i] - my);
    ss_tot += (seq_t[i] - my) * (seq_t[i] - my);
  }
  report.fit_per_object_ms = sxy / sxx;
  report.fit_base_ms = my - report.fit_per_object_ms * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double predicted = report.fit_per_object_ms * seq_m[i] + report.fit_base_ms;
    ss_res += (seq_t[i] - predicted) * (seq_t[i] - predicted);
  }
  report.fit_r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_bench_report(out_dir, report);
  }
  return report;
}

void write_experiment_report(const std::string& dir, const ExperimentReport& report,
                             const PipelineConfig& cfg) {
  fs::create_directories(dir);

  json j;
  j["eval_frame"] = report.eval_frame;
  j["rows"] = json::array();
  for (const auto& row : report.rows) {
    j["rows"].push_back({{"input", row.input},
                         {"coverage", row.coverage},
                         {"ap", row.ap},
                         {"ap_0.4", row.ap_04},
                         {"ap_0.8", row.ap_08},
                         {"grasps", row.grasp_count}});
  }
  {
    std::ofstream out(fs::path(dir) / "report.json");
    out << j.dump(2) << '\n';
  }

  // Wall-clock numbers vary run to run; they live in a separate file so the
  // metric report stays byte-comparable across reruns.
  json jt;
  jt["stage1_seconds"] = report.stage1_seconds;
  const TimingRow mean = report.timing.mean();
  jt["stage2_frame_ms"] = {{"segmentation", mean.segmentation_ms},
                           {"tracking", mean.tracking_ms},
                           {"assembly", mean.assembly_ms},
                           {"grasp", mean.grasp_ms},
                           {"total", mean.total_ms}};
  {
    std::ofstream out(fs::path(dir) / "timing.json");
    out << jt.dump(2) << '\n';
  }

  std::ofstream txt(fs::path(dir) / "report.txt");
  txt << "input            coverage      AP  AP_0.8  AP_0.4  grasps\n";
  char buf[160];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%-15s %9.4f %7.4f %7.4f %7.4f %7d\n", row.input.c_str(),
                  row.coverage, row.ap, row.ap_08, row.ap_04, row.grasp_count);
    txt << buf;
  }
  std::snprintf(buf, sizeof(buf), "eval frame %d, friction sweep size %zu\n", report.eval_frame,
                cfg.eval.mu_list.size());
  txt << buf;
}

void write_bench_report(const std::string& dir, const BenchReport& report) {
  fs::create_directories(dir);

  json j;
  j["hardware_threads"] = report.hardware_threads;
  j["rows"] = json::array();
  for (const auto& row : report.rows) {
    j["rows"].push_back({{"objects", row.object_count},
                         {"mode", row.parallel ? "parallel" : "sequential"},
                         {"segmentation_ms", row.segmentation_ms},
                         {"tracking_ms", row.tracking_ms},
                         {"assembly_ms", row.assembly_ms},
                         {"grasp_ms", row.grasp_ms},
                         {"total_ms", row.total_ms}});
  }
  j["sequential_fit"] = {{"per_object_ms", report.fit_per_object_ms},
                         {"base_ms", report.fit_base_ms},
                         {"r_squared", report.fit_r_squared}};
  j["reference_pipeline_ms"] = {
      {"segmentation", 33.3}, {"tracking_per_object", 76.0}, {"grasp", 250.0}, {"total", 359.3}};
  {
    std::ofstream out(fs::path(dir) / "bench.json");
    out << j.dump(2) << '\n';
  }

  std::ofstream txt(fs::path(dir) / "bench.txt");
  txt << "objects  mode        segmentation  tracking  assembly   grasp    total (ms/frame)\n";
  char buf[200];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%5d    %-10s %11.2f %9.2f %9.2f %8.2f %8.2f\n",
                  row.object_count, row.parallel ? "parallel" : "sequential",
                  row.segmentation_ms, row.tracking_ms, row.assembly_ms, row.grasp_ms,
                  row.total_ms);
    txt << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "sequential fit: total = %.2f * M + %.2f ms, R^2 = %.4f (threads: %d)\n",
                report.fit_per_object_ms, report.fit_base_ms, report.fit_r_squared,
                report.hardware_threads);
  txt << buf;
}

void write_manifest(const std::string& dir, const PipelineConfig& cfg) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).string();
    if (rel == "manifest.txt") continue;
    files.push_back(rel + " " + std::to_string(fs::file_size(entry.path())));
  }
  std::sort(files.begin(), files.end());
  std::ofstream out(fs::path(dir) / "manifest.txt");
  if (!out) throw InvalidInputError("write_manifest: cannot write in " + dir);
  out << "config_hash " << config_hash(cfg) << '\n';
  for (const auto& f : files) out << f << '\n';
}

}  // namespace scantrack
