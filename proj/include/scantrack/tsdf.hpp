#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scantrack/camera.hpp"
#include "scantrack/point_cloud.hpp"

namespace scantrack {

/// Object-centric truncated signed distance volume (model frame).
/// sdf stores meters clamped to [-trunc, trunc]; weight counts observations
/// (unit-weight running mean). weight == 0 marks never-observed voxels.
class TsdfVolume {
 public:
  TsdfVolume() = default;
  TsdfVolume(const Eigen::Vector3d& origin, double voxel_size, const Eigen::Vector3i& dims,
             double trunc);

  const Eigen::Vector3d& origin() const { return origin_; }
  double voxel_size() const { return voxel_size_; }
  const Eigen::Vector3i& dims() const { return dims_; }
  double trunc() const { return trunc_; }

  size_t voxel_count() const { return sdf_.size(); }
  size_t index(int i, int j, int k) const {
    return (static_cast<size_t>(k) * dims_[1] + j) * dims_[0] + i;
  }
  Eigen::Vector3d voxel_center(int i, int j, int k) const {
    return origin_ + voxel_size_ * Eigen::Vector3d(i + 0.5, j + 0.5, k + 0.5);
  }

  float sdf_at(size_t idx) const { return sdf_[idx]; }
  float weight_at(size_t idx) const { return weight_[idx]; }
  const std::vector<float>& sdf() const { return sdf_; }
  const std::vector<float>& weight() const { return weight_; }

  /// Projective TSDF update from one masked depth frame. pose maps the model
  /// frame into the frame's camera frame. Voxels behind the surface by more
  /// than trunc, outside the frustum, or off the object's mask are untouched.
  /// No-op when the mask does not contain object_id.
  void integrate(const ScanFrame& frame, int32_t object_id, const RigidTransform& pose);

  /// Direct write access for analytically constructed volumes (tests, tools).
  void set_voxel(int i, int j, int k, float sdf, float weight);

  /// Raw little-endian dump: one header line
  /// "tsdf <dx> <dy> <dz> <voxel_size> <ox> <oy> <oz> <trunc>\n"
  /// followed by float32 sdf then float32 weight arrays.
  void save(const std::string& path) const;
  static TsdfVolume load(const std::string& path);

 private:
  Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
  double voxel_size_ = 0.0;
  Eigen::Vector3i dims_ = Eigen::Vector3i::Zero();
  double trunc_ = 0.0;
  std::vector<float> sdf_;
  std::vector<float> weight_;
};

/// Volume sized to the cloud's axis-aligned bounds expanded by padding.
/// Throws InvalidInputError on an empty cloud, non-positive voxel size,
/// trunc < voxel_size, or a voxel count above max_voxels.
TsdfVolume create_volume(const PointCloud& model_cloud, double voxel_size, double trunc,
                         double padding, size_t max_voxels = 256ull * 256 * 256);

/// Marching-cubes surface at the zero crossing. Cells touching any
/// never-observed voxel are skipped. Throws EmptyMeshError when no cell
/// produces a zero crossing.
TriangleMesh extract_mesh(const TsdfVolume& volume);

/// Area-weighted uniform surface sampling with face normals, deterministic
/// for a given seed. Every face gets at least one sample. density is points
/// per square meter. An empty mesh yields an empty cloud.
PointCloud mesh_to_cloud(const TriangleMesh& mesh, double density, uint64_t seed = 1);

}  // namespace scantrack
