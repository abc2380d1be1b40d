#include "scantrack/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "scantrack/errors.hpp"

namespace scantrack {

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InvalidInputError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InvalidInputError("cannot open for reading: " + path);
  return in;
}

void write_pose_fields(std::ostream& out, const RigidTransform& pose) {
  const Eigen::Vector3d& t = pose.translation();
  out << format_fixed(t.x()) << ' ' << format_fixed(t.y()) << ' ' << format_fixed(t.z());
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << ' ' << format_fixed(pose.rotation()(r, c));
  }
}

RigidTransform parse_pose_fields(std::istringstream& ss, const std::string& path) {
  Eigen::Vector3d t;
  Eigen::Matrix3d r;
  if (!(ss >> t.x() >> t.y() >> t.z())) throw InvalidInputError("bad pose line in " + path);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (!(ss >> r(i, j))) throw InvalidInputError("bad pose line in " + path);
    }
  }
  // 6-decimal quantization leaves the matrix slightly off the manifold.
  return RigidTransform(orthonormalized(r), t);
}

}  // namespace

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  // Avoid the "-0.000000" / "0.000000" split for the same logical value.
  if (std::strcmp(buf, "-0.000000") == 0) return "0.000000";
  return buf;
}

void write_ply(const std::string& path, const PointCloud& cloud,
               const std::vector<int32_t>* provenance) {
  cloud.validate();
  if (provenance && provenance->size() != cloud.size()) {
    throw InvalidInputError("write_ply: provenance length mismatch");
  }
  auto out = open_out(path);
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_normals()) {
    out << "property float nx\nproperty float ny\nproperty float nz\n";
  }
  if (cloud.has_labels()) out << "property int label\n";
  if (provenance) out << "property int provenance\n";
  out << "end_header\n";
  for (size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.positions[i];
    out << format_fixed(p.x()) << ' ' << format_fixed(p.y()) << ' ' << format_fixed(p.z());
    if (cloud.has_normals()) {
      const auto& n = cloud.normals[i];
      out << ' ' << format_fixed(n.x()) << ' ' << format_fixed(n.y()) << ' ' << format_fixed(n.z());
    }
    if (cloud.has_labels()) out << ' ' << cloud.labels[i];
    if (provenance) out << ' ' << (*provenance)[i];
    out << '\n';
  }
}

PointCloud read_ply(const std::string& path, std::vector<int32_t>* provenance) {
  auto in = open_in(path);
  std::string line;
  size_t n_vertices = 0;
  std::vector<std::string> props;
  bool header_done = false;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "element") {
      std::string what;
      ss >> what >> n_vertices;
      if (what != "vertex") throw InvalidInputError("read_ply: unsupported element in " + path);
    } else if (tok == "property") {
      std::string type, name;
      ss >> type >> name;
      props.push_back(name);
    } else if (tok == "end_header") {
      header_done = true;
      break;
    } else if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "ascii") throw InvalidInputError("read_ply: only ascii supported: " + path);
    }
  }
  if (!header_done) throw InvalidInputError("read_ply: truncated header in " + path);

  const bool with_normals =
      std::find(props.begin(), props.end(), "nx") != props.end();
  const bool with_labels =
      std::find(props.begin(), props.end(), "label") != props.end();
  const bool with_prov =
      std::find(props.begin(), props.end(), "provenance") != props.end();

  PointCloud cloud;
  cloud.positions.reserve(n_vertices);
  if (provenance) provenance->clear();
  for (size_t i = 0; i < n_vertices; ++i) {
    if (!std::getline(in, line)) throw InvalidInputError("read_ply: truncated body in " + path);
    std::istringstream ss(line);
    Eigen::Vector3d p;
    ss >> p.x() >> p.y() >> p.z();
    cloud.positions.push_back(p);
    if (with_normals) {
      Eigen::Vector3d n;
      ss >> n.x() >> n.y() >> n.z();
      const double len = n.norm();
      cloud.normals.push_back(len > 0.0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::UnitZ());
    }
    if (with_labels) {
      int32_t label = 0;
      ss >> label;
      cloud.labels.push_back(label);
    }
    if (with_prov) {
      int32_t prov = 0;
      ss >> prov;
      if (provenance) provenance->push_back(prov);
    }
    if (!ss) throw InvalidInputError("read_ply: malformed vertex line in " + path);
  }
  return cloud;
}

void write_obj(const std::string& path, const TriangleMesh& mesh) {
  mesh.validate();
  auto out = open_out(path);
  for (const auto& v : mesh.vertices) {
    out << "v " << format_fixed(v.x()) << ' ' << format_fixed(v.y()) << ' '
        << format_fixed(v.z()) << '\n';
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

TriangleMesh read_obj(const std::string& path) {
  auto in = open_in(path);
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "v") {
      Eigen::Vector3d v;
      ss >> v.x() >> v.y() >> v.z();
      if (!ss) throw InvalidInputError("read_obj: malformed vertex in " + path);
      mesh.vertices.push_back(v);
    } else if (tok == "f") {
      std::vector<int> idx;
      std::string field;
      while (ss >> field) {
        // "3", "3/1", "3//2", "3/1/2" all start with the vertex index.
        idx.push_back(std::stoi(field.substr(0, field.find('/'))));
      }
      if (idx.size() < 3) throw InvalidInputError("read_obj: face with <3 vertices in " + path);
      for (size_t k = 2; k < idx.size(); ++k) {
        mesh.triangles.emplace_back(idx[0] - 1, idx[k - 1] - 1, idx[k] - 1);
      }
    }
  }
  mesh.validate();
  return mesh;
}

void write_trajectory(const std::string& path, const std::vector<RigidTransform>& poses) {
  auto out = open_out(path);
  for (size_t i = 0; i < poses.size(); ++i) {
    out << i << ' ';
    write_pose_fields(out, poses[i]);
    out << '\n';
  }
}

std::vector<RigidTransform> read_trajectory(const std::string& path) {
  auto in = open_in(path);
  std::vector<RigidTransform> poses;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    size_t index = 0;
    ss >> index;
    poses.push_back(parse_pose_fields(ss, path));
  }
  return poses;
}

void write_pose_records(const std::string& path, const std::vector<PoseRecord>& records) {
  auto out = open_out(path);
  for (const auto& rec : records) {
    out << rec.frame_index << ' ' << rec.object_id << ' ';
    write_pose_fields(out, rec.pose);
    out << '\n';
  }
}

std::vector<PoseRecord> read_pose_records(const std::string& path) {
  auto in = open_in(path);
  std::vector<PoseRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    PoseRecord rec;
    ss >> rec.frame_index >> rec.object_id;
    rec.pose = parse_pose_fields(ss, path);
    records.push_back(rec);
  }
  return records;
}

namespace {

constexpr char kFrameMagic[4] = {'S', 'C', 'N', 'F'};

template <typename T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void write_frame(const std::string& path, const ScanFrame& frame) {
  frame.validate();
  auto out = open_out(path, true);
  out.write(kFrameMagic, 4);
  put<int32_t>(out, frame.intr.width);
  put<int32_t>(out, frame.intr.height);
  put<int32_t>(out, frame.index);
  put<double>(out, frame.intr.fx);
  put<double>(out, frame.intr.fy);
  put<double>(out, frame.intr.cx);
  put<double>(out, frame.intr.cy);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) put<double>(out, frame.cam_pose.rotation()(r, c));
  }
  for (int k = 0; k < 3; ++k) put<double>(out, frame.cam_pose.translation()[k]);
  out.write(reinterpret_cast<const char*>(frame.depth.values().data()),
            static_cast<std::streamsize>(frame.depth.values().size() * sizeof(float)));
  out.write(reinterpret_cast<const char*>(frame.mask.labels().data()),
            static_cast<std::streamsize>(frame.mask.labels().size() * sizeof(int32_t)));
}

ScanFrame read_frame(const std::string& path) {
  auto in = open_in(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFrameMagic, 4) != 0) {
    throw InvalidInputError("read_frame: bad magic in " + path);
  }
  ScanFrame frame;
  frame.intr.width = get<int32_t>(in);
  frame.intr.height = get<int32_t>(in);
  frame.index = get<int32_t>(in);
  frame.intr.fx = get<double>(in);
  frame.intr.fy = get<double>(in);
  frame.intr.cx = get<double>(in);
  frame.intr.cy = get<double>(in);
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = get<double>(in);
  }
  Eigen::Vector3d t;
  for (int k = 0; k < 3; ++k) t[k] = get<double>(in);
  frame.cam_pose = RigidTransform(r, t);

  const size_t n = static_cast<size_t>(frame.intr.width) * frame.intr.height;
  std::vector<float> depth(n);
  in.read(reinterpret_cast<char*>(depth.data()), static_cast<std::streamsize>(n * sizeof(float)));
  std::vector<int32_t> mask(n);
  in.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(n * sizeof(int32_t)));
  if (!in) throw InvalidInputError("read_frame: truncated file " + path);
  frame.depth = DepthImage(frame.intr.width, frame.intr.height, std::move(depth));
  frame.mask = InstanceMask(frame.intr.width, frame.intr.height, std::move(mask));
  return frame;
}

}  // namespace scantrack
