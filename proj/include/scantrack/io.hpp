#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scantrack/camera.hpp"
#include "scantrack/point_cloud.hpp"

namespace scantrack {

/// ASCII PLY with properties x,y,z[,nx,ny,nz][,label][,provenance].
/// Floats are written with fixed 6 decimals so exports are byte-stable.
void write_ply(const std::string& path, const PointCloud& cloud,
               const std::vector<int32_t>* provenance = nullptr);

/// Reads the subset of ASCII PLY written by write_ply. Normals are
/// renormalized after parsing to absorb the 6-decimal quantization.
PointCloud read_ply(const std::string& path, std::vector<int32_t>* provenance = nullptr);

/// Wavefront OBJ, v/f lines only, fixed 6 decimals.
void write_obj(const std::string& path, const TriangleMesh& mesh);

/// Reads v/f lines; "f a/b/c" forms are accepted and polygons fan-triangulated.
TriangleMesh read_obj(const std::string& path);

/// One pose per line: "index tx ty tz r00 r01 r02 r10 ... r22", 6 decimals.
void write_trajectory(const std::string& path, const std::vector<RigidTransform>& poses);
std::vector<RigidTransform> read_trajectory(const std::string& path);

/// Per-object pose track: "frame_index object_id tx ty tz r00..r22".
struct PoseRecord {
  int frame_index = 0;
  int object_id = 0;
  RigidTransform pose;
};
void write_pose_records(const std::string& path, const std::vector<PoseRecord>& records);
std::vector<PoseRecord> read_pose_records(const std::string& path);

/// Binary frame container: fixed little-endian header + raw float32 depth and
/// int32 mask planes. Bit-exact round trip by construction.
void write_frame(const std::string& path, const ScanFrame& frame);
ScanFrame read_frame(const std::string& path);

/// Formats a double with fixed 6 decimals (shared by all text exports).
std::string format_fixed(double value);

}  // namespace scantrack
