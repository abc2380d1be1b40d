#include "scantrack/assembler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "scantrack/cloud_ops.hpp"
#include "scantrack/errors.hpp"
#include "scantrack/io.hpp"

namespace fs = std::filesystem;

namespace scantrack {

RegisteredObject* ObjectRegistry::find(int32_t id) {
  for (auto& obj : objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

const RegisteredObject* ObjectRegistry::find(int32_t id) const {
  for (const auto& obj : objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

std::vector<PointCloud> reconstruct_objects(const ObjectRegistry& registry,
                                            const std::map<int32_t, RigidTransform>& poses) {
  std::vector<PointCloud> clouds;
  for (const auto& obj : registry.objects) {
    if (obj.lost) continue;
    const auto it = poses.find(obj.id);
    if (it == poses.end()) continue;
    PointCloud placed = transform_cloud(obj.sampled_cloud, it->second);
    placed.labels.assign(placed.size(), obj.id);
    clouds.push_back(std::move(placed));
  }
  return clouds;
}

MergedScene merge_scene(const PointCloud& partial, const std::vector<PointCloud>& objects,
                        double dedup_rho, int frame_index) {
  MergedScene merged;
  merged.frame_index = frame_index;

  // Raw concatenation, observed first.
  PointCloud concat = partial;
  if (concat.has_normals() || concat.has_labels()) {
    // Channel bookkeeping below requires aligned arrays.
    if (concat.has_normals() && concat.normals.size() != concat.size()) {
      throw InvalidInputError("merge_scene: partial cloud channels misaligned");
    }
  }
  std::vector<int32_t> prov(concat.size(), static_cast<int32_t>(Provenance::kObserved));
  const bool want_normals =
      partial.has_normals() || std::any_of(objects.begin(), objects.end(),
                                           [](const PointCloud& c) { return c.has_normals(); });
  const bool want_labels =
      partial.has_labels() || std::any_of(objects.begin(), objects.end(),
                                          [](const PointCloud& c) { return c.has_labels(); });
  if (want_normals && !concat.has_normals()) {
    concat.normals.assign(concat.size(), Eigen::Vector3d::UnitZ());
  }
  if (want_labels && !concat.has_labels()) concat.labels.assign(concat.size(), 0);

  for (const auto& object_cloud : objects) {
    for (size_t i = 0; i < object_cloud.size(); ++i) {
      concat.positions.push_back(object_cloud.positions[i]);
      if (want_normals) {
        concat.normals.push_back(object_cloud.has_normals() ? object_cloud.normals[i]
                                                            : Eigen::Vector3d::UnitZ());
      }
      if (want_labels) {
        concat.labels.push_back(object_cloud.has_labels() ? object_cloud.labels[i] : 0);
      }
      prov.push_back(static_cast<int32_t>(Provenance::kReconstructed));
    }
  }

  if (dedup_rho <= 0.0) {
    merged.cloud = std::move(concat);
    merged.provenance = std::move(prov);
    return merged;
  }

  struct Accum {
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    Eigen::Vector3d nrm = Eigen::Vector3d::Zero();
    std::map<int32_t, int> votes;
    int count = 0;

    void add(const PointCloud& c, size_t i, bool labels) {
      pos += c.positions[i];
      if (c.has_normals()) nrm += c.normals[i];
      if (labels) votes[c.labels[i]]++;
      count++;
    }
  };
  struct Cell {
    Accum observed;
    Accum reconstructed;
  };

  std::map<std::array<int64_t, 3>, Cell> grid;
  for (size_t i = 0; i < concat.size(); ++i) {
    const Eigen::Vector3d& p = concat.positions[i];
    const std::array<int64_t, 3> key = {static_cast<int64_t>(std::floor(p.x() / dedup_rho)),
                                        static_cast<int64_t>(std::floor(p.y() / dedup_rho)),
                                        static_cast<int64_t>(std::floor(p.z() / dedup_rho))};
    Cell& cell = grid[key];
    if (prov[i] == static_cast<int32_t>(Provenance::kObserved)) {
      cell.observed.add(concat, i, want_labels);
    } else {
      cell.reconstructed.add(concat, i, want_labels);
    }
  }

  merged.cloud.positions.reserve(grid.size());
  for (const auto& [key, cell] : grid) {
    // Observed data dominates: reconstructed points never displace it.
    const Accum& use = cell.observed.count > 0 ? cell.observed : cell.reconstructed;
    merged.cloud.positions.push_back(use.pos / use.count);
    if (want_normals) {
      Eigen::Vector3d n = use.nrm;
      merged.cloud.normals.push_back(n.squaredNorm() > 1e-12 ? Eigen::Vector3d(n.normalized())
                                                             : Eigen::Vector3d::UnitZ());
    }
    if (want_labels) {
      int32_t best_label = 0;
      int best_votes = -1;
      for (const auto& [label, votes] : use.votes) {
        if (votes > best_votes) {
          best_votes = votes;
          best_label = label;
        }
      }
      merged.cloud.labels.push_back(best_label);
    }
    merged.provenance.push_back(cell.observed.count > 0
                                    ? static_cast<int32_t>(Provenance::kObserved)
                                    : static_cast<int32_t>(Provenance::kReconstructed));
  }
  return merged;
}

void write_merged_scene(const std::string& path, const MergedScene& scene) {
  write_ply(path, scene.cloud, &scene.provenance);
}

namespace {

std::string object_stem(const std::string& dir, int32_t id) {
  return (fs::path(dir) / ("obj_" + std::to_string(id))).string();
}

}  // namespace

void save_registry(const std::string& dir, const ObjectRegistry& registry) {
  fs::create_directories(dir);
  std::ofstream index(fs::path(dir) / "registry.txt");
  if (!index) throw InvalidInputError("save_registry: cannot write to " + dir);

  for (const auto& obj : registry.objects) {
    index << obj.id << ' ' << (obj.lost ? "lost" : "tracked");
    if (obj.lost) index << ' ' << obj.diagnostic;
    index << '\n';
    const std::string stem = object_stem(dir, obj.id);
    if (!obj.lost) {
      write_obj(stem + ".obj", obj.mesh);
      write_ply(stem + "_cloud.ply", obj.sampled_cloud);
    }
    write_ply(stem + "_model.ply", obj.track.model_cloud);

    std::vector<PoseRecord> pool_records;
    for (const auto& kf : obj.track.pool.keyframes()) {
      pool_records.push_back({kf.frame_index, obj.id, kf.pose});
      write_ply(stem + "_kf_" + std::to_string(kf.id) + ".ply", kf.object_cloud);
    }
    write_pose_records(stem + "_pool.txt", pool_records);
    write_pose_records(stem + "_traj.txt", obj.trajectory);
  }
}

ObjectRegistry load_registry(const std::string& dir, const TrackerParams& params) {
  std::ifstream index(fs::path(dir) / "registry.txt");
  if (!index) throw InvalidInputError("load_registry: missing registry.txt in " + dir);

  ObjectRegistry registry;
  std::string line;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    RegisteredObject obj;
    std::string status;
    ss >> obj.id >> status;
    obj.lost = (status == "lost");
    std::getline(ss, obj.diagnostic);

    const std::string stem = object_stem(dir, obj.id);
    if (!obj.lost) {
      obj.mesh = read_obj(stem + ".obj");
      obj.sampled_cloud = read_ply(stem + "_cloud.ply");
    }

    TrackState state;
    state.object_id = obj.id;
    state.params = params;
    state.model_cloud = read_ply(stem + "_model.ply");
    state.model_target = voxel_downsample(state.model_cloud, params.track_voxel);
    if (state.model_target.size() >= static_cast<size_t>(params.normal_k)) {
      state.model_target = estimate_normals(state.model_target, params.normal_k);
    }
    state.model_tree.build(state.model_target.positions);
    state.pool = KeyframeMemoryPool(params.theta_key_deg, params.d_key, params.pool_query_size);

    const auto pool_records = read_pose_records(stem + "_pool.txt");
    for (size_t k = 0; k < pool_records.size(); ++k) {
      PointCloud kf_cloud = read_ply(stem + "_kf_" + std::to_string(k) + ".ply");
      state.pool.add(std::move(kf_cloud), pool_records[k].pose, pool_records[k].frame_index);
    }
    if (fs::exists(stem + "_traj.txt")) {
      obj.trajectory = read_pose_records(stem + "_traj.txt");
    }
    if (!obj.trajectory.empty()) {
      // Warm start from the last scan-stage pose.
      state.pose = obj.trajectory.back().pose;
    } else if (!pool_records.empty()) {
      state.pose = pool_records.back().pose;
    }
    state.status = obj.lost ? TrackStatus::kLost : TrackStatus::kTracking;
    obj.track = std::move(state);
    registry.objects.push_back(std::move(obj));
  }
  return registry;
}

}  // namespace scantrack
