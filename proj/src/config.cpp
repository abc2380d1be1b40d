#include "scantrack/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "scantrack/errors.hpp"

namespace scantrack {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct KeyValueSink {
  std::map<std::string, std::string> entries;

  void put(const std::string& key, double v) { entries[key] = fmt_double(v); }
  void put(const std::string& key, int v) { entries[key] = std::to_string(v); }
  void put(const std::string& key, uint64_t v) { entries[key] = std::to_string(v); }
  void put(const std::string& key, bool v) { entries[key] = v ? "on" : "off"; }
  void put(const std::string& key, const std::string& v) { entries[key] = v; }
};

struct KeyValueSource {
  std::map<std::string, std::string> entries;
  mutable std::map<std::string, bool> consumed;

  bool has(const std::string& key) const { return entries.count(key) > 0; }

  template <typename T>
  void get(const std::string& key, T& out) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return;  // keep the default
    consumed[key] = true;
    std::istringstream ss(it->second);
    ss >> out;
    if (ss.fail()) throw InvalidInputError("config: bad value for " + key);
  }

  void get(const std::string& key, bool& out) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return;
    consumed[key] = true;
    if (it->second == "on" || it->second == "true" || it->second == "1") {
      out = true;
    } else if (it->second == "off" || it->second == "false" || it->second == "0") {
      out = false;
    } else {
      throw InvalidInputError("config: bad boolean for " + key + ": " + it->second);
    }
  }

  void get(const std::string& key, std::string& out) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return;
    consumed[key] = true;
    out = it->second;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : entries) {
      if (!consumed.count(key)) throw InvalidInputError("config: unknown key " + key);
    }
  }
};

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(values[i]);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  camera.validate();
  if (!(trajectory.radius > 0.0)) throw InvalidInputError("config: trajectory radius must be > 0");
  if (trajectory.n_azimuth < 1 || trajectory.n_elevation < 1) {
    throw InvalidInputError("config: trajectory counts must be >= 1");
  }
  if (!(tsdf_voxel_size > 0.0) || tsdf_trunc < tsdf_voxel_size) {
    throw InvalidInputError("config: tsdf trunc must be >= voxel size > 0");
  }
  if (!(merge_dedup_rho >= 0.0)) throw InvalidInputError("config: dedup rho must be >= 0");
  if (!(mesh_sample_density > 0.0) || !(gt_sample_density > 0.0)) {
    throw InvalidInputError("config: sample densities must be > 0");
  }
  gripper.validate();
  eval.validate();
  if (max_lost_frames < 0) throw InvalidInputError("config: max_lost_frames must be >= 0");
}

std::string serialize_config(const PipelineConfig& cfg) {
  KeyValueSink kv;
  kv.put("camera.fx", cfg.camera.fx);
  kv.put("camera.fy", cfg.camera.fy);
  kv.put("camera.cx", cfg.camera.cx);
  kv.put("camera.cy", cfg.camera.cy);
  kv.put("camera.width", cfg.camera.width);
  kv.put("camera.height", cfg.camera.height);

  kv.put("trajectory.center_x", cfg.trajectory.center.x());
  kv.put("trajectory.center_y", cfg.trajectory.center.y());
  kv.put("trajectory.center_z", cfg.trajectory.center.z());
  kv.put("trajectory.radius", cfg.trajectory.radius);
  kv.put("trajectory.n_azimuth", cfg.trajectory.n_azimuth);
  kv.put("trajectory.n_elevation", cfg.trajectory.n_elevation);
  kv.put("trajectory.azimuth_start_deg", cfg.trajectory.azimuth_start_deg);
  kv.put("trajectory.azimuth_span_deg", cfg.trajectory.azimuth_span_deg);
  kv.put("trajectory.elevation_min_deg", cfg.trajectory.elevation_min_deg);
  kv.put("trajectory.elevation_max_deg", cfg.trajectory.elevation_max_deg);

  kv.put("render.max_depth", cfg.render.max_depth);
  kv.put("render.noise_sigma", cfg.render.noise_sigma);

  kv.put("tracker.theta_key_deg", cfg.tracker.theta_key_deg);
  kv.put("tracker.d_key", cfg.tracker.d_key);
  kv.put("tracker.pool_k", cfg.tracker.pool_query_size);
  kv.put("tracker.d_corr", cfg.tracker.icp.max_corr_dist);
  kv.put("tracker.icp_eps", cfg.tracker.icp.converge_eps);
  kv.put("tracker.icp_max_iter", cfg.tracker.icp.max_iterations);
  kv.put("tracker.f_min", cfg.tracker.icp.min_inlier_fraction);
  kv.put("tracker.min_mask_pixels", cfg.tracker.min_mask_pixels);
  kv.put("tracker.track_voxel", cfg.tracker.track_voxel);
  kv.put("tracker.normal_k", cfg.tracker.normal_k);
  kv.put("tracker.refine", cfg.tracker.refine_with_pool);
  kv.put("tracker.max_lost_frames", cfg.max_lost_frames);

  kv.put("tsdf.voxel_size", cfg.tsdf_voxel_size);
  kv.put("tsdf.trunc", cfg.tsdf_trunc);
  kv.put("tsdf.padding", cfg.tsdf_padding);

  kv.put("mesh.sample_density", cfg.mesh_sample_density);
  kv.put("merge.dedup_rho", cfg.merge_dedup_rho);
  kv.put("merge.fully_visible_rho", cfg.fully_visible_rho);

  kv.put("gripper.max_width", cfg.gripper.max_width);
  kv.put("gripper.finger_depth", cfg.gripper.finger_depth);
  kv.put("gripper.finger_thickness", cfg.gripper.finger_thickness);
  kv.put("gripper.palm_depth", cfg.gripper.palm_depth);

  kv.put("grasp.antipodal_angle_deg", cfg.grasp.antipodal_angle_deg);
  kv.put("grasp.clearance", cfg.grasp.clearance);
  kv.put("grasp.pair_cylinder_radius", cfg.grasp.pair_cylinder_radius);
  kv.put("grasp.max_seeds", cfg.grasp.max_seeds);
  kv.put("grasp.n_keep", cfg.grasp.n_keep);
  kv.put("grasp.normal_k", cfg.grasp.normal_k);

  kv.put("eval.mu_list", join_doubles(cfg.eval.mu_list));
  kv.put("eval.k_max", cfg.eval.k_max);
  kv.put("eval.gt_sample_density", cfg.gt_sample_density);
  kv.put("eval.frame", cfg.eval_frame);

  kv.put("pipeline.masks",
         std::string(cfg.mask_source == MaskSource::kOracle ? "oracle" : "propagated"));
  kv.put("pipeline.parallel_objects", cfg.parallel_objects);
  kv.put("pipeline.seed", cfg.seed);

  kv.put("bench.scan_views", cfg.bench_scan_views);
  kv.put("bench.frames", cfg.bench_frames);
  kv.put("bench.warmup_frames", cfg.bench_warmup_frames);

  std::ostringstream out;
  for (const auto& [key, value] : kv.entries) out << key << " = " << value << '\n';
  return out.str();
}

PipelineConfig parse_config(const std::string& text) {
  KeyValueSource kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::istringstream probe(line);
      std::string leftover;
      if (probe >> leftover) throw InvalidInputError("config: malformed line: " + line);
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv.entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  PipelineConfig cfg;
  kv.get("camera.fx", cfg.camera.fx);
  kv.get("camera.fy", cfg.camera.fy);
  kv.get("camera.cx", cfg.camera.cx);
  kv.get("camera.cy", cfg.camera.cy);
  kv.get("camera.width", cfg.camera.width);
  kv.get("camera.height", cfg.camera.height);

  kv.get("trajectory.center_x", cfg.trajectory.center.x());
  kv.get("trajectory.center_y", cfg.trajectory.center.y());
  kv.get("trajectory.center_z", cfg.trajectory.center.z());
  kv.get("trajectory.radius", cfg.trajectory.radius);
  kv.get("trajectory.n_azimuth", cfg.trajectory.n_azimuth);
  kv.get("trajectory.n_elevation", cfg.trajectory.n_elevation);
  kv.get("trajectory.azimuth_start_deg", cfg.trajectory.azimuth_start_deg);
  kv.get("trajectory.azimuth_span_deg", cfg.trajectory.azimuth_span_deg);
  kv.get("trajectory.elevation_min_deg", cfg.trajectory.elevation_min_deg);
  kv.get("trajectory.elevation_max_deg", cfg.trajectory.elevation_max_deg);

  kv.get("render.max_depth", cfg.render.max_depth);
  kv.get("render.noise_sigma", cfg.render.noise_sigma);

  kv.get("tracker.theta_key_deg", cfg.tracker.theta_key_deg);
  kv.get("tracker.d_key", cfg.tracker.d_key);
  kv.get("tracker.pool_k", cfg.tracker.pool_query_size);
  kv.get("tracker.d_corr", cfg.tracker.icp.max_corr_dist);
  kv.get("tracker.icp_eps", cfg.tracker.icp.converge_eps);
  kv.get("tracker.icp_max_iter", cfg.tracker.icp.max_iterations);
  kv.get("tracker.f_min", cfg.tracker.icp.min_inlier_fraction);
  kv.get("tracker.min_mask_pixels", cfg.tracker.min_mask_pixels);
  kv.get("tracker.track_voxel", cfg.tracker.track_voxel);
  kv.get("tracker.normal_k", cfg.tracker.normal_k);
  kv.get("tracker.refine", cfg.tracker.refine_with_pool);
  kv.get("tracker.max_lost_frames", cfg.max_lost_frames);

  kv.get("tsdf.voxel_size", cfg.tsdf_voxel_size);
  kv.get("tsdf.trunc", cfg.tsdf_trunc);
  kv.get("tsdf.padding", cfg.tsdf_padding);

  kv.get("mesh.sample_density", cfg.mesh_sample_density);
  kv.get("merge.dedup_rho", cfg.merge_dedup_rho);
  kv.get("merge.fully_visible_rho", cfg.fully_visible_rho);

  kv.get("gripper.max_width", cfg.gripper.max_width);
  kv.get("gripper.finger_depth", cfg.gripper.finger_depth);
  kv.get("gripper.finger_thickness", cfg.gripper.finger_thickness);
  kv.get("gripper.palm_depth", cfg.gripper.palm_depth);

  kv.get("grasp.antipodal_angle_deg", cfg.grasp.antipodal_angle_deg);
  kv.get("grasp.clearance", cfg.grasp.clearance);
  kv.get("grasp.pair_cylinder_radius", cfg.grasp.pair_cylinder_radius);
  kv.get("grasp.max_seeds", cfg.grasp.max_seeds);
  kv.get("grasp.n_keep", cfg.grasp.n_keep);
  kv.get("grasp.normal_k", cfg.grasp.normal_k);

  if (kv.has("eval.mu_list")) {
    std::string mu_text;
    kv.get("eval.mu_list", mu_text);
    cfg.eval.mu_list = split_doubles(mu_text);
  }
  kv.get("eval.k_max", cfg.eval.k_max);
  kv.get("eval.gt_sample_density", cfg.gt_sample_density);
  kv.get("eval.frame", cfg.eval_frame);

  if (kv.has("pipeline.masks")) {
    std::string masks;
    kv.get("pipeline.masks", masks);
    if (masks == "oracle") {
      cfg.mask_source = MaskSource::kOracle;
    } else if (masks == "propagated") {
      cfg.mask_source = MaskSource::kPropagated;
    } else {
      throw InvalidInputError("config: pipeline.masks must be oracle or propagated");
    }
  }
  kv.get("pipeline.parallel_objects", cfg.parallel_objects);
  kv.get("pipeline.seed", cfg.seed);

  kv.get("bench.scan_views", cfg.bench_scan_views);
  kv.get("bench.frames", cfg.bench_frames);
  kv.get("bench.warmup_frames", cfg.bench_warmup_frames);

  kv.reject_unknown();
  cfg.validate();
  return cfg;
}

void write_config(const std::string& path, const PipelineConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("write_config: cannot open " + path);
  out << serialize_config(cfg);
}

PipelineConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("read_config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

uint64_t config_hash(const PipelineConfig& cfg) {
  const std::string text = serialize_config(cfg);
  uint64_t h = 1469598103934665603ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace scantrack
