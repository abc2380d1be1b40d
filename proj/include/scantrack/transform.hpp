#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace scantrack {

/// Rigid body transform in SE(3): p' = R*p + t.
///
/// The rotation is kept as a full 3x3 matrix and validated on construction:
/// R^T*R = I and det(R) = 1, each within 1e-9. Use orthonormalized() after
/// long chains of numeric updates to snap back onto the manifold.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}

  /// Throws InvalidInputError if R is not a proper rotation within 1e-9.
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return RigidTransform(); }

  /// Rotation about a unit axis by angle (radians) plus translation.
  static RigidTransform from_axis_angle(const Eigen::Vector3d& axis, double angle,
                                        const Eigen::Vector3d& translation = Eigen::Vector3d::Zero());

  static RigidTransform translate(const Eigen::Vector3d& t) {
    return RigidTransform(Eigen::Matrix3d::Identity(), t);
  }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation_ * p + translation_; }
  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const { return rotation_ * v; }

  bool is_identity(double tol = 0.0) const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

/// (a ∘ b)(p) = a(b(p)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

RigidTransform invert(const RigidTransform& t);

/// Geodesic distance between rotations, in radians.
double rotation_angle_between(const RigidTransform& a, const RigidTransform& b);

double translation_distance(const RigidTransform& a, const RigidTransform& b);

/// SO(3) exponential: axis-angle vector -> rotation matrix (Rodrigues).
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega);

/// SO(3) logarithm: rotation matrix -> axis-angle vector.
Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation);

/// Nearest proper rotation to an arbitrary 3x3 matrix (polar/SVD projection).
Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& m);

/// True iff m is orthonormal with det +1, entrywise within tol.
bool is_rotation_matrix(const Eigen::Matrix3d& m, double tol = 1e-9);

}  // namespace scantrack
