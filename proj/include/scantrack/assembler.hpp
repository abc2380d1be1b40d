#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scantrack/io.hpp"
#include "scantrack/point_cloud.hpp"
#include "scantrack/tracker.hpp"

namespace scantrack {

enum class Provenance : int32_t { kObserved = 0, kReconstructed = 1 };

/// Per-object assets produced by the registration stage.
struct RegisteredObject {
  int32_t id = 0;
  TriangleMesh mesh;              // model frame
  PointCloud sampled_cloud;       // surface samples of mesh, with normals
  TrackState track;
  std::vector<PoseRecord> trajectory;  // scan-stage pose track
  bool lost = false;
  std::string diagnostic;         // set when lost
};

struct ObjectRegistry {
  std::vector<RegisteredObject> objects;

  RegisteredObject* find(int32_t id);
  const RegisteredObject* find(int32_t id) const;
};

/// Completed scene for one frame: merged cloud plus per-point source tags.
struct MergedScene {
  PointCloud cloud;                   // camera frame
  std::vector<int32_t> provenance;    // Provenance per point
  int frame_index = 0;
};

/// Object clouds placed at their tracked camera-frame poses. Lost objects are
/// omitted; their ids are absent from the result.
std::vector<PointCloud> reconstruct_objects(const ObjectRegistry& registry,
                                            const std::map<int32_t, RigidTransform>& poses);

/// Concatenates the observed cloud with the reconstructed object clouds, then
/// voxel-deduplicates at dedup_rho. Within a voxel, observed points dominate:
/// the representative is the centroid of the observed points there, and
/// reconstructed points in that voxel are dropped. Reconstructed-only voxels
/// keep the reconstructed centroid. dedup_rho <= 0 keeps the raw
/// concatenation (no deduplication).
MergedScene merge_scene(const PointCloud& partial, const std::vector<PointCloud>& objects,
                        double dedup_rho, int frame_index = 0);

/// Files written under <dir>: registry.txt plus per-object mesh (.obj),
/// sampled cloud / model cloud (.ply), keyframe pool and pose files.
void save_registry(const std::string& dir, const ObjectRegistry& registry);
ObjectRegistry load_registry(const std::string& dir, const TrackerParams& params);

/// PLY with the extra integer "provenance" property.
void write_merged_scene(const std::string& path, const MergedScene& scene);

}  // namespace scantrack
