#pragma once

#include <cstdint>
#include <vector>

#include "scantrack/transform.hpp"

namespace scantrack {

/// Pinhole camera model. Image coordinates: u right, v down, z forward.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws InvalidInputError on a non-physical model.
  void validate() const;
};

/// Per-pixel depth in meters, row-major. 0 marks an invalid pixel.
class DepthImage {
 public:
  DepthImage() = default;
  DepthImage(int width, int height, float fill = 0.0f);
  DepthImage(int width, int height, std::vector<float> values);

  int width() const { return width_; }
  int height() const { return height_; }
  float at(int u, int v) const { return values_[static_cast<size_t>(v) * width_ + u]; }
  float& at(int u, int v) { return values_[static_cast<size_t>(v) * width_ + u]; }
  const std::vector<float>& values() const { return values_; }
  std::vector<float>& values() { return values_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

/// Per-pixel instance id, row-major. 0 = background, 1..M = objects.
class InstanceMask {
 public:
  InstanceMask() = default;
  InstanceMask(int width, int height, int32_t fill = 0);
  InstanceMask(int width, int height, std::vector<int32_t> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  int32_t at(int u, int v) const { return labels_[static_cast<size_t>(v) * width_ + u]; }
  int32_t& at(int u, int v) { return labels_[static_cast<size_t>(v) * width_ + u]; }
  const std::vector<int32_t>& labels() const { return labels_; }

  /// Number of pixels carrying the given id.
  size_t count(int32_t id) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<int32_t> labels_;
};

/// One observation: depth + instance mask + intrinsics + camera-to-world pose.
struct ScanFrame {
  DepthImage depth;
  InstanceMask mask;
  CameraIntrinsics intr;
  RigidTransform cam_pose;  // camera-to-world
  int index = 0;

  /// Throws InvalidInputError if depth/mask/intrinsics dimensions disagree.
  void validate() const;
};

}  // namespace scantrack
