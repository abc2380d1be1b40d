#include "scantrack/icp.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "scantrack/errors.hpp"

namespace scantrack {

IcpResult icp_register(const PointCloud& source, const PointCloud& target,
                       const RigidTransform& init, const IcpParams& params) {
  const KdTree3 tree(target.positions);
  return icp_register(source, target, tree, init, params);
}

IcpResult icp_register(const PointCloud& source, const PointCloud& target,
                       const KdTree3& target_tree, const RigidTransform& init,
                       const IcpParams& params) {
  if (source.size() < 10 || target.size() < 10) {
    throw InvalidInputError("icp_register: both clouds need at least 10 points");
  }
  if (!target.has_normals()) {
    throw InvalidInputError("icp_register: target cloud has no normals");
  }

  IcpResult result;
  result.transform = init;
  const double max_sq = params.max_corr_dist * params.max_corr_dist;

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    result.iterations = iter + 1;

    Eigen::Matrix<double, 6, 6> hess = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> grad = Eigen::Matrix<double, 6, 1>::Zero();
    double residual_sq_sum = 0.0;
    size_t n_corr = 0;

    for (size_t i = 0; i < source.size(); ++i) {
      const Eigen::Vector3d p = result.transform.apply(source.positions[i]);
      double sq = 0.0;
      const int j = target_tree.nearest(p, &sq);
      if (j < 0 || sq > max_sq) continue;
      const Eigen::Vector3d& q = target.positions[j];
      const Eigen::Vector3d& n = target.normals[j];

      const double r = n.dot(p - q);
      // d r / d [omega; t] with the update p' = exp(omega) p + t linearized.
      Eigen::Matrix<double, 6, 1> jac;
      jac.head<3>() = p.cross(n);
      jac.tail<3>() = n;

      hess.noalias() += jac * jac.transpose();
      grad.noalias() += jac * r;
      residual_sq_sum += r * r;
      ++n_corr;
    }

    result.inlier_fraction = static_cast<double>(n_corr) / static_cast<double>(source.size());
    result.rms_residual = n_corr > 0 ? std::sqrt(residual_sq_sum / n_corr) : 0.0;
    if (n_corr < 6) break;  // rank-deficient; keep the current estimate

    // Levenberg damping keeps near-degenerate geometry (single plane) stable.
    hess.diagonal().array() += 1e-9 * hess.diagonal().maxCoeff() + 1e-15;
    const Eigen::Matrix<double, 6, 1> delta = hess.ldlt().solve(-grad);
    if (!delta.allFinite()) break;

    const Eigen::Matrix3d dr = so3_exp(delta.head<3>());
    const Eigen::Matrix3d new_rot = orthonormalized(dr * result.transform.rotation());
    const Eigen::Vector3d new_trans = dr * result.transform.translation() + delta.tail<3>();
    result.transform = RigidTransform(new_rot, new_trans);

    if (delta.norm() < params.converge_eps) break;
  }

  // Refresh stats at the final pose so callers see the converged state.
  {
    double residual_sq_sum = 0.0;
    size_t n_corr = 0;
    for (size_t i = 0; i < source.size(); ++i) {
      const Eigen::Vector3d p = result.transform.apply(source.positions[i]);
      double sq = 0.0;
      const int j = target_tree.nearest(p, &sq);
      if (j < 0 || sq > max_sq) continue;
      const double r = target.normals[j].dot(p - target.positions[j]);
      residual_sq_sum += r * r;
      ++n_corr;
    }
    result.inlier_fraction = static_cast<double>(n_corr) / static_cast<double>(source.size());
    result.rms_residual = n_corr > 0 ? std::sqrt(residual_sq_sum / n_corr) : 0.0;
  }

  result.succeeded = result.inlier_fraction >= params.min_inlier_fraction;
  return result;
}

}  // namespace scantrack
