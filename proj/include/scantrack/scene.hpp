#pragma once

#include <map>
#include <string>
#include <vector>

#include "scantrack/point_cloud.hpp"
#include "scantrack/transform.hpp"

namespace scantrack {

struct SceneObject {
  int32_t id = 0;                // 1..M, unique
  TriangleMesh mesh;             // object frame
  RigidTransform pose;           // object-to-world
  std::string description;       // primitive line it was built from, for echoing
};

/// Ground-truth world: posed meshes plus an optional finite ground patch at z=0.
struct SceneModel {
  std::vector<SceneObject> objects;
  bool ground_plane = true;
  double ground_half_extent = 0.8;  // meters, square patch around the origin

  /// Unique contiguous ids from 1, non-empty meshes. Throws InvalidInputError.
  void validate() const;

  const SceneObject* find(int32_t id) const;
};

/// Left-composes the given per-id deltas onto object poses: pose' = delta * pose.
/// Unknown ids throw InvalidInputError.
SceneModel perturb_objects(const SceneModel& scene, const std::map<int32_t, RigidTransform>& deltas);

/// Scene spec text format, one directive per line:
///   ground on|off [half_extent]
///   box SX SY SZ pos TX TY TZ [axisangle AX AY AZ ANGLE]
///   cylinder RADIUS HEIGHT pos ... [axisangle ...]
///   sphere RADIUS pos ... [axisangle ...]
///   obj PATH pos ... [axisangle ...]
/// Objects get ids 1..M in file order. '#' starts a comment.
SceneModel read_scene_spec(const std::string& path);
void write_scene_spec(const std::string& path, const SceneModel& scene);

}  // namespace scantrack
