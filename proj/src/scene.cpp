#include "scantrack/scene.hpp"

#include <fstream>
#include <sstream>

#include "scantrack/errors.hpp"
#include "scantrack/io.hpp"
#include "scantrack/primitives.hpp"

namespace scantrack {

void SceneModel::validate() const {
  for (size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].id != static_cast<int32_t>(i) + 1) {
      throw InvalidInputError("scene: object ids must be contiguous from 1");
    }
    if (objects[i].mesh.triangles.empty()) {
      throw InvalidInputError("scene: object mesh is empty");
    }
    objects[i].mesh.validate();
  }
}

const SceneObject* SceneModel::find(int32_t id) const {
  for (const auto& obj : objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

SceneModel perturb_objects(const SceneModel& scene,
                           const std::map<int32_t, RigidTransform>& deltas) {
  for (const auto& [id, delta] : deltas) {
    if (!scene.find(id)) {
      throw InvalidInputError("perturb_objects: unknown object id " + std::to_string(id));
    }
  }
  SceneModel out = scene;
  for (auto& obj : out.objects) {
    const auto it = deltas.find(obj.id);
    if (it != deltas.end()) obj.pose = compose(it->second, obj.pose);
  }
  return out;
}

namespace {

RigidTransform parse_pose_tokens(std::istringstream& ss, const std::string& line) {
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle = 0.0;
  std::string tok;
  while (ss >> tok) {
    if (tok == "pos") {
      if (!(ss >> t.x() >> t.y() >> t.z())) {
        throw InvalidInputError("scene spec: bad pos in line: " + line);
      }
    } else if (tok == "axisangle") {
      if (!(ss >> axis.x() >> axis.y() >> axis.z() >> angle)) {
        throw InvalidInputError("scene spec: bad axisangle in line: " + line);
      }
    } else {
      throw InvalidInputError("scene spec: unknown token '" + tok + "' in line: " + line);
    }
  }
  if (angle == 0.0) return RigidTransform::translate(t);
  return RigidTransform::from_axis_angle(axis, angle, t);
}

}  // namespace

SceneModel read_scene_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open scene spec: " + path);

  SceneModel scene;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::string kind;
    if (!(ss >> kind)) continue;

    if (kind == "ground") {
      std::string state;
      ss >> state;
      scene.ground_plane = (state == "on");
      double half = 0.0;
      if (ss >> half) scene.ground_half_extent = half;
      continue;
    }

    SceneObject obj;
    obj.id = static_cast<int32_t>(scene.objects.size()) + 1;
    if (kind == "box") {
      double sx, sy, sz;
      if (!(ss >> sx >> sy >> sz)) throw InvalidInputError("scene spec: bad box line: " + line);
      obj.mesh = make_box(sx, sy, sz);
      obj.description = "box " + format_fixed(sx) + " " + format_fixed(sy) + " " + format_fixed(sz);
    } else if (kind == "cylinder") {
      double r, h;
      if (!(ss >> r >> h)) throw InvalidInputError("scene spec: bad cylinder line: " + line);
      obj.mesh = make_cylinder(r, h);
      obj.description = "cylinder " + format_fixed(r) + " " + format_fixed(h);
    } else if (kind == "sphere") {
      double r;
      if (!(ss >> r)) throw InvalidInputError("scene spec: bad sphere line: " + line);
      obj.mesh = make_sphere(r);
      obj.description = "sphere " + format_fixed(r);
    } else if (kind == "obj") {
      std::string mesh_path;
      if (!(ss >> mesh_path)) throw InvalidInputError("scene spec: bad obj line: " + line);
      obj.mesh = read_obj(mesh_path);
      obj.description = "obj " + mesh_path;
    } else {
      throw InvalidInputError("scene spec: unknown directive '" + kind + "'");
    }
    obj.pose = parse_pose_tokens(ss, line);
    scene.objects.push_back(std::move(obj));
  }
  scene.validate();
  return scene;
}

void write_scene_spec(const std::string& path, const SceneModel& scene) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write scene spec: " + path);
  out << "ground " << (scene.ground_plane ? "on" : "off") << ' '
      << format_fixed(scene.ground_half_extent) << '\n';
  for (const auto& obj : scene.objects) {
    out << obj.description << " pos " << format_fixed(obj.pose.translation().x()) << ' '
        << format_fixed(obj.pose.translation().y()) << ' '
        << format_fixed(obj.pose.translation().z());
    const Eigen::Vector3d omega = so3_log(obj.pose.rotation());
    const double angle = omega.norm();
    if (angle > 1e-12) {
      const Eigen::Vector3d axis = omega / angle;
      out << " axisangle " << format_fixed(axis.x()) << ' ' << format_fixed(axis.y()) << ' '
          << format_fixed(axis.z()) << ' ' << format_fixed(angle);
    }
    out << '\n';
  }
}

}  // namespace scantrack
