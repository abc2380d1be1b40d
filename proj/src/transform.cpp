#include "scantrack/transform.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "scantrack/errors.hpp"

namespace scantrack {

bool is_rotation_matrix(const Eigen::Matrix3d& m, double tol) {
  const Eigen::Matrix3d gram = m.transpose() * m;
  if (((gram - Eigen::Matrix3d::Identity()).array().abs() > tol).any()) return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation_matrix(rotation_)) {
    throw InvalidInputError("RigidTransform: rotation is not orthonormal with det +1");
  }
  if (!translation_.allFinite()) {
    throw InvalidInputError("RigidTransform: translation is not finite");
  }
}

RigidTransform RigidTransform::from_axis_angle(const Eigen::Vector3d& axis, double angle,
                                               const Eigen::Vector3d& translation) {
  const double n = axis.norm();
  if (n <= 0.0 || !std::isfinite(n)) {
    throw InvalidInputError("from_axis_angle: zero or non-finite axis");
  }
  return RigidTransform(so3_exp(axis * (angle / n)), translation);
}

bool RigidTransform::is_identity(double tol) const {
  return ((rotation_ - Eigen::Matrix3d::Identity()).array().abs() <= tol).all() &&
         (translation_.array().abs() <= tol).all();
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  // Re-orthonormalize so long chains cannot drift off the manifold.
  const Eigen::Matrix3d r = orthonormalized(a.rotation() * b.rotation());
  return RigidTransform(r, a.rotation() * b.translation() + a.translation());
}

RigidTransform invert(const RigidTransform& t) {
  const Eigen::Matrix3d rt = t.rotation().transpose();
  return RigidTransform(rt, -(rt * t.translation()));
}

double rotation_angle_between(const RigidTransform& a, const RigidTransform& b) {
  const double c = ((a.rotation().transpose() * b.rotation()).trace() - 1.0) * 0.5;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

double translation_distance(const RigidTransform& a, const RigidTransform& b) {
  return (a.translation() - b.translation()).norm();
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  Eigen::Matrix3d k;
  k << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;
  if (theta < 1e-12) {
    return orthonormalized(Eigen::Matrix3d::Identity() + k);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return orthonormalized(Eigen::Matrix3d::Identity() + a * k + b * (k * k));
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation) {
  const double c = std::clamp((rotation.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(c);
  Eigen::Vector3d axis(rotation(2, 1) - rotation(1, 2), rotation(0, 2) - rotation(2, 0),
                       rotation(1, 0) - rotation(0, 1));
  if (theta < 1e-9) {
    return 0.5 * axis;  // first-order term
  }
  if (theta > M_PI - 1e-6) {
    // Near pi the off-diagonal difference degenerates; recover the axis from
    // the symmetric part instead.
    Eigen::Matrix3d s = 0.5 * (rotation + Eigen::Matrix3d::Identity());
    int k = 0;
    s.diagonal().maxCoeff(&k);
    Eigen::Vector3d v = s.col(k);
    v /= std::sqrt(std::max(s(k, k), 1e-18));
    v.normalize();
    // Pick the sign consistent with the skew part when it is not exactly zero.
    if (axis.dot(v) < 0.0) v = -v;
    return v * theta;
  }
  return axis * (theta / (2.0 * std::sin(theta)));
}

Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

}  // namespace scantrack
