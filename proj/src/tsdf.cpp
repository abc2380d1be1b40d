#include "scantrack/tsdf.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

#include "scantrack/errors.hpp"
#include "scantrack/parallel.hpp"

#include "marching_tables.hpp"

namespace scantrack {

TsdfVolume::TsdfVolume(const Eigen::Vector3d& origin, double voxel_size,
                       const Eigen::Vector3i& dims, double trunc)
    : origin_(origin), voxel_size_(voxel_size), dims_(dims), trunc_(trunc) {
  if (!(voxel_size > 0.0)) throw InvalidInputError("tsdf: voxel size must be positive");
  if (trunc < voxel_size) throw InvalidInputError("tsdf: trunc must be >= voxel size");
  if ((dims.array() < 1).any()) throw InvalidInputError("tsdf: dims must be >= 1");
  const size_t n = static_cast<size_t>(dims[0]) * dims[1] * dims[2];
  sdf_.assign(n, static_cast<float>(trunc));
  weight_.assign(n, 0.0f);
}

void TsdfVolume::set_voxel(int i, int j, int k, float sdf, float weight) {
  const float t = static_cast<float>(trunc_);
  sdf_[index(i, j, k)] = std::clamp(sdf, -t, t);
  weight_[index(i, j, k)] = weight;
}

void TsdfVolume::integrate(const ScanFrame& frame, int32_t object_id,
                           const RigidTransform& pose) {
  frame.validate();
  if (frame.mask.count(object_id) == 0) return;

  const double fx = frame.intr.fx, fy = frame.intr.fy;
  const double cx = frame.intr.cx, cy = frame.intr.cy;
  const int width = frame.intr.width, height = frame.intr.height;
  const float trunc_f = static_cast<float>(trunc_);

  parallel_for(static_cast<size_t>(dims_[2]), [&](size_t kk) {
    const int k = static_cast<int>(kk);
    for (int j = 0; j < dims_[1]; ++j) {
      for (int i = 0; i < dims_[0]; ++i) {
        const Eigen::Vector3d x_cam = pose.apply(voxel_center(i, j, k));
        if (x_cam.z() <= 1e-6) continue;
        const int u = static_cast<int>(std::lround(x_cam.x() * fx / x_cam.z() + cx));
        const int v = static_cast<int>(std::lround(x_cam.y() * fy / x_cam.z() + cy));
        if (u < 0 || u >= width || v < 0 || v >= height) continue;
        if (frame.mask.at(u, v) != object_id) continue;
        const double d = frame.depth.at(u, v);
        if (d <= 0.0) continue;

        const float s =
            std::clamp(static_cast<float>(d - x_cam.z()), -trunc_f, trunc_f);
        if (s <= -trunc_f) continue;  // occluded beyond the truncation band

        const size_t idx = index(i, j, k);
        const float w = weight_[idx];
        sdf_[idx] = (w * sdf_[idx] + s) / (w + 1.0f);
        weight_[idx] = w + 1.0f;
      }
    }
  });
}

void TsdfVolume::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("tsdf save: cannot open " + path);
  std::ostringstream header;
  header << "tsdf " << dims_[0] << ' ' << dims_[1] << ' ' << dims_[2] << ' ' << voxel_size_ << ' '
         << origin_.x() << ' ' << origin_.y() << ' ' << origin_.z() << ' ' << trunc_ << '\n';
  out << header.str();
  out.write(reinterpret_cast<const char*>(sdf_.data()),
            static_cast<std::streamsize>(sdf_.size() * sizeof(float)));
  out.write(reinterpret_cast<const char*>(weight_.data()),
            static_cast<std::streamsize>(weight_.size() * sizeof(float)));
}

TsdfVolume TsdfVolume::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("tsdf load: cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::istringstream ss(line);
  std::string magic;
  Eigen::Vector3i dims;
  Eigen::Vector3d origin;
  double voxel_size = 0.0, trunc = 0.0;
  ss >> magic >> dims[0] >> dims[1] >> dims[2] >> voxel_size >> origin.x() >> origin.y() >>
      origin.z() >> trunc;
  if (magic != "tsdf" || !ss) throw InvalidInputError("tsdf load: bad header in " + path);
  TsdfVolume vol(origin, voxel_size, dims, trunc);
  in.read(reinterpret_cast<char*>(vol.sdf_.data()),
          static_cast<std::streamsize>(vol.sdf_.size() * sizeof(float)));
  in.read(reinterpret_cast<char*>(vol.weight_.data()),
          static_cast<std::streamsize>(vol.weight_.size() * sizeof(float)));
  if (!in) throw InvalidInputError("tsdf load: truncated file " + path);
  return vol;
}

TsdfVolume create_volume(const PointCloud& model_cloud, double voxel_size, double trunc,
                         double padding, size_t max_voxels) {
  if (model_cloud.empty()) throw InvalidInputError("create_volume: empty cloud");
  if (!(voxel_size > 0.0)) throw InvalidInputError("create_volume: voxel size must be positive");

  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (const auto& p : model_cloud.positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo.array() -= padding;
  hi.array() += padding;

  Eigen::Vector3i dims;
  for (int k = 0; k < 3; ++k) {
    dims[k] = std::max(1, static_cast<int>(std::ceil((hi[k] - lo[k]) / voxel_size - 1e-9)));
  }
  const size_t count = static_cast<size_t>(dims[0]) * dims[1] * dims[2];
  if (count > max_voxels) {
    throw InvalidInputError("create_volume: " + std::to_string(count) +
                            " voxels exceed the budget of " + std::to_string(max_voxels));
  }
  return TsdfVolume(lo, voxel_size, dims, trunc);
}

TriangleMesh extract_mesh(const TsdfVolume& volume) {
  const Eigen::Vector3i dims = volume.dims();
  TriangleMesh mesh;

  // Cube corner offsets and the edges between them, in the table convention.
  static const int kShift[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                   {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  static const int kEdgeVerts[12][2] = {{0, 1}, {1, 2}, {3, 2}, {0, 3}, {4, 5}, {5, 6},
                                        {7, 6}, {4, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  // Canonical edge key: cell of the edge origin plus the edge axis (x/y/z).
  static const int kEdgeShift[12][4] = {{0, 0, 0, 0}, {1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1},
                                        {0, 0, 1, 0}, {1, 0, 1, 1}, {0, 1, 1, 0}, {0, 0, 1, 1},
                                        {0, 0, 0, 2}, {1, 0, 0, 2}, {1, 1, 0, 2}, {0, 1, 0, 2}};

  auto edge_key = [&](int i, int j, int k, int axis) {
    return ((static_cast<int64_t>(k) * (dims[1] + 1) + j) * (dims[0] + 1) + i) * 4 + axis;
  };
  std::unordered_map<int64_t, int> edge_vertex;

  for (int k = 0; k + 1 < dims[2]; ++k) {
    for (int j = 0; j + 1 < dims[1]; ++j) {
      for (int i = 0; i + 1 < dims[0]; ++i) {
        float f[8];
        int cube_index = 0;
        bool observed = true;
        for (int c = 0; c < 8; ++c) {
          const size_t idx =
              volume.index(i + kShift[c][0], j + kShift[c][1], k + kShift[c][2]);
          if (volume.weight_at(idx) <= 0.0f) {
            observed = false;
            break;
          }
          f[c] = volume.sdf_at(idx);
          if (f[c] < 0.0f) cube_index |= (1 << c);
        }
        if (!observed || cube_index == 0 || cube_index == 255) continue;

        int edge_to_index[12];
        for (int e = 0; e < 12; ++e) {
          if (!(mc::kEdgeTable[cube_index] & (1 << e))) continue;
          const int64_t key = edge_key(i + kEdgeShift[e][0], j + kEdgeShift[e][1],
                                       k + kEdgeShift[e][2], kEdgeShift[e][3]);
          const auto it = edge_vertex.find(key);
          if (it != edge_vertex.end()) {
            edge_to_index[e] = it->second;
            continue;
          }
          const int a = kEdgeVerts[e][0], b = kEdgeVerts[e][1];
          const double fa = std::abs(static_cast<double>(f[a]));
          const double fb = std::abs(static_cast<double>(f[b]));
          Eigen::Vector3d pt =
              volume.voxel_center(i + kEdgeShift[e][0], j + kEdgeShift[e][1], k + kEdgeShift[e][2]);
          pt[kEdgeShift[e][3]] += fa * volume.voxel_size() / std::max(fa + fb, 1e-30);
          edge_to_index[e] = static_cast<int>(mesh.vertices.size());
          edge_vertex.emplace(key, edge_to_index[e]);
          mesh.vertices.push_back(pt);
        }
        for (int t = 0; mc::kTriTable[cube_index][t] != -1; t += 3) {
          // Swap to make face normals point toward positive sdf (outward).
          mesh.triangles.emplace_back(edge_to_index[mc::kTriTable[cube_index][t]],
                                      edge_to_index[mc::kTriTable[cube_index][t + 2]],
                                      edge_to_index[mc::kTriTable[cube_index][t + 1]]);
        }
      }
    }
  }

  if (mesh.triangles.empty()) throw EmptyMeshError("extract_mesh: no zero crossing in volume");
  return mesh;
}

PointCloud mesh_to_cloud(const TriangleMesh& mesh, double density, uint64_t seed) {
  if (!(density > 0.0)) throw InvalidInputError("mesh_to_cloud: density must be positive");
  PointCloud cloud;
  if (mesh.triangles.empty()) return cloud;

  std::mt19937_64 rng(seed + 0x5851f42d4c957f2dULL);
  // Platform-independent uniform [0,1): top 53 bits of the generator output.
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector3d& a = mesh.vertices[tri[0]];
    const Eigen::Vector3d& b = mesh.vertices[tri[1]];
    const Eigen::Vector3d& c = mesh.vertices[tri[2]];
    const double area = 0.5 * (b - a).cross(c - a).norm();
    const long long n = std::max(1ll, std::llround(area * density));
    const Eigen::Vector3d normal = mesh.face_normal(static_cast<int>(t));
    for (long long s = 0; s < n; ++s) {
      const double r1 = std::sqrt(uniform());
      const double r2 = uniform();
      cloud.positions.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
      cloud.normals.push_back(normal);
    }
  }
  return cloud;
}

}  // namespace scantrack
