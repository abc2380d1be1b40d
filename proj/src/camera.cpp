#include "scantrack/camera.hpp"

#include <algorithm>
#include <cmath>

#include "scantrack/errors.hpp"

namespace scantrack {

void CameraIntrinsics::validate() const {
  if (width <= 0 || height <= 0) throw InvalidInputError("intrinsics: non-positive image size");
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidInputError("intrinsics: focal lengths must be positive");
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
    throw InvalidInputError("intrinsics: principal point outside image");
  }
}

DepthImage::DepthImage(int width, int height, float fill)
    : width_(width), height_(height), values_(static_cast<size_t>(width) * height, fill) {}

DepthImage::DepthImage(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != static_cast<size_t>(width_) * height_) {
    throw InvalidInputError("depth image: value count does not match dimensions");
  }
  for (float v : values_) {
    if (!(v >= 0.0f) || !std::isfinite(v)) {
      throw InvalidInputError("depth image: values must be finite and >= 0");
    }
  }
}

InstanceMask::InstanceMask(int width, int height, int32_t fill)
    : width_(width), height_(height), labels_(static_cast<size_t>(width) * height, fill) {}

InstanceMask::InstanceMask(int width, int height, std::vector<int32_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (labels_.size() != static_cast<size_t>(width_) * height_) {
    throw InvalidInputError("instance mask: label count does not match dimensions");
  }
}

size_t InstanceMask::count(int32_t id) const {
  return static_cast<size_t>(std::count(labels_.begin(), labels_.end(), id));
}

void ScanFrame::validate() const {
  intr.validate();
  if (depth.width() != intr.width || depth.height() != intr.height) {
    throw InvalidInputError("scan frame: depth dimensions do not match intrinsics");
  }
  if (mask.width() != intr.width || mask.height() != intr.height) {
    throw InvalidInputError("scan frame: mask dimensions do not match intrinsics");
  }
  if (index < 0) throw InvalidInputError("scan frame: negative index");
}

}  // namespace scantrack
