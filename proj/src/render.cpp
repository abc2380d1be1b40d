#include "scantrack/render.hpp"

#include <cmath>
#include <random>

#include "scantrack/cloud_ops.hpp"
#include "scantrack/errors.hpp"
#include "scantrack/parallel.hpp"

namespace scantrack {

namespace {

// Right-handed camera basis: z forward along the view ray, y down in the
// image, x right. Columns of R are the camera axes in world coordinates.
RigidTransform look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
  const Eigen::Vector3d z = (target - eye).normalized();
  // In-image up = world +z projected off the optical axis; y_cam points down.
  Eigen::Vector3d y = -(Eigen::Vector3d::UnitZ() - Eigen::Vector3d::UnitZ().dot(z) * z);
  if (y.squaredNorm() < 1e-12) {
    y = Eigen::Vector3d::UnitY() - Eigen::Vector3d::UnitY().dot(z) * z;
  }
  y.normalize();
  const Eigen::Vector3d x = y.cross(z).normalized();
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return RigidTransform(orthonormalized(r), eye);
}

}  // namespace

std::vector<RigidTransform> hemisphere_trajectory(const TrajectoryParams& params) {
  if (!(params.radius > 0.0)) throw InvalidInputError("trajectory: radius must be positive");
  if (params.n_azimuth < 1 || params.n_elevation < 1) {
    throw InvalidInputError("trajectory: counts must be >= 1");
  }

  const double deg = M_PI / 180.0;
  std::vector<double> elevations;
  if (params.n_elevation == 1) {
    elevations.push_back(params.elevation_max_deg * deg);
  } else {
    for (int j = 0; j < params.n_elevation; ++j) {
      const double f = static_cast<double>(j) / (params.n_elevation - 1);
      elevations.push_back((params.elevation_max_deg +
                            f * (params.elevation_min_deg - params.elevation_max_deg)) *
                           deg);
    }
  }

  std::vector<RigidTransform> poses;
  poses.reserve(static_cast<size_t>(params.n_azimuth) * params.n_elevation);
  for (const double elev : elevations) {
    for (int i = 0; i < params.n_azimuth; ++i) {
      const double az =
          (params.azimuth_start_deg + params.azimuth_span_deg * i / params.n_azimuth) * deg;
      const Eigen::Vector3d eye =
          params.center + params.radius * Eigen::Vector3d(std::cos(elev) * std::cos(az),
                                                          std::cos(elev) * std::sin(az),
                                                          std::sin(elev));
      poses.push_back(look_at(eye, params.center));
    }
  }
  return poses;
}

TriangleBvh build_scene_bvh(const SceneModel& scene) {
  TriangleBvh bvh;
  for (const auto& obj : scene.objects) {
    bvh.add_mesh(transform_mesh(obj.mesh, obj.pose), obj.id);
  }
  bvh.build();
  return bvh;
}

ScanFrame render_frame(const SceneModel& scene, const TriangleBvh& bvh,
                       const RigidTransform& cam_pose, const CameraIntrinsics& intr,
                       int frame_index, const RenderOptions& options) {
  intr.validate();
  if (scene.objects.empty() && !scene.ground_plane) {
    throw InvalidInputError("render_frame: empty scene without ground plane");
  }

  ScanFrame frame;
  frame.intr = intr;
  frame.cam_pose = cam_pose;
  frame.index = frame_index;
  frame.depth = DepthImage(intr.width, intr.height, 0.0f);
  frame.mask = InstanceMask(intr.width, intr.height, 0);

  const Eigen::Vector3d origin = cam_pose.translation();
  const Eigen::Matrix3d rot = cam_pose.rotation();

  parallel_for(static_cast<size_t>(intr.height), [&](size_t row) {
    const int v = static_cast<int>(row);
    for (int u = 0; u < intr.width; ++u) {
      // Unnormalized camera-frame direction with dz = 1: the ray parameter t
      // equals depth, and backproject() inverts the hit exactly.
      const Eigen::Vector3d dir_cam((u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0);
      const Eigen::Vector3d dir = rot * dir_cam;

      double best_t = options.max_depth;
      int32_t best_id = -1;
      const RayHit hit = bvh.raycast(origin, dir, 1e-9, best_t);
      if (hit.hit) {
        best_t = hit.t;
        best_id = hit.object_id;
      }
      if (scene.ground_plane && std::abs(dir.z()) > 1e-12) {
        const double t_ground = -origin.z() / dir.z();
        if (t_ground > 1e-9 && t_ground < best_t) {
          const Eigen::Vector3d p = origin + t_ground * dir;
          if (std::abs(p.x()) <= scene.ground_half_extent &&
              std::abs(p.y()) <= scene.ground_half_extent) {
            best_t = t_ground;
            best_id = 0;
          }
        }
      }
      if (best_id >= 0) {
        frame.depth.at(u, v) = static_cast<float>(best_t);
        frame.mask.at(u, v) = best_id;
      }
    }
  });

  if (options.noise_sigma > 0.0) {
    std::mt19937_64 rng(options.noise_seed * 0x9e3779b97f4a7c15ULL +
                        static_cast<uint64_t>(frame_index) + 1);
    std::normal_distribution<double> gauss(0.0, options.noise_sigma);
    for (float& d : frame.depth.values()) {
      if (d > 0.0f) d = std::max(1e-4f, d + static_cast<float>(gauss(rng)));
    }
  }
  return frame;
}

ScanFrame render_frame(const SceneModel& scene, const RigidTransform& cam_pose,
                       const CameraIntrinsics& intr, int frame_index,
                       const RenderOptions& options) {
  return render_frame(scene, build_scene_bvh(scene), cam_pose, intr, frame_index, options);
}

PointCloud fully_visible_cloud(const SceneModel& scene,
                               const std::vector<RigidTransform>& trajectory,
                               const CameraIntrinsics& intr, double dedup_rho, bool with_normals,
                               int normal_k) {
  if (trajectory.empty()) throw InvalidInputError("fully_visible_cloud: empty trajectory");
  const TriangleBvh bvh = build_scene_bvh(scene);

  PointCloud all;
  for (size_t i = 0; i < trajectory.size(); ++i) {
    const ScanFrame frame = render_frame(scene, bvh, trajectory[i], intr, static_cast<int>(i));
    PointCloud view = backproject(frame.depth, frame.intr, &frame.mask);
    if (view.empty()) continue;
    if (with_normals && view.size() >= static_cast<size_t>(normal_k)) {
      view = estimate_normals(view, normal_k);  // oriented toward this view's camera
    }
    view = transform_cloud(view, trajectory[i]);
    all.positions.insert(all.positions.end(), view.positions.begin(), view.positions.end());
    all.labels.insert(all.labels.end(), view.labels.begin(), view.labels.end());
    if (view.has_normals()) {
      all.normals.insert(all.normals.end(), view.normals.begin(), view.normals.end());
    }
  }
  if (all.has_normals() && all.normals.size() != all.positions.size()) {
    // A tiny view skipped normal estimation; drop the channel rather than
    // ship misaligned arrays.
    all.normals.clear();
  }
  if (all.empty()) return all;
  return voxel_downsample(all, dedup_rho);
}

}  // namespace scantrack
