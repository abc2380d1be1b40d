#include "scantrack/bvh.hpp"

#include <algorithm>
#include <limits>

#include "scantrack/errors.hpp"

namespace scantrack {

void TriangleBvh::add_mesh(const TriangleMesh& mesh, int32_t object_id) {
  for (const auto& tri : mesh.triangles) {
    tri_a_.push_back(mesh.vertices[tri[0]]);
    tri_b_.push_back(mesh.vertices[tri[1]]);
    tri_c_.push_back(mesh.vertices[tri[2]]);
    centroids_.push_back((tri_a_.back() + tri_b_.back() + tri_c_.back()) / 3.0);
    ids_.push_back(object_id);
  }
}

void TriangleBvh::build() {
  nodes_.clear();
  order_.resize(tri_a_.size());
  for (size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  root_ = tri_a_.empty() ? -1 : build_recursive(0, static_cast<int>(tri_a_.size()));
}

int TriangleBvh::build_recursive(int begin, int end) {
  Node node;
  node.lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  for (int i = begin; i < end; ++i) {
    const int t = order_[i];
    node.lo = node.lo.cwiseMin(tri_a_[t]).cwiseMin(tri_b_[t]).cwiseMin(tri_c_[t]);
    node.hi = node.hi.cwiseMax(tri_a_[t]).cwiseMax(tri_b_[t]).cwiseMax(tri_c_[t]);
  }
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  if (end - begin <= kLeafSize) {
    nodes_[node_index].begin = begin;
    nodes_[node_index].end = end;
    return node_index;
  }

  int axis = 0;
  (node.hi - node.lo).maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double ca = centroids_[a][axis], cb = centroids_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const int left = build_recursive(begin, mid);
  const int right = build_recursive(mid, end);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

namespace {

// Slab test against the node box; returns false when the box cannot contain
// a closer hit than t_best.
inline bool box_hit(const Eigen::Vector3d& origin, const Eigen::Vector3d& inv_dir,
                    const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, double t_min,
                    double t_best) {
  double t0 = t_min, t1 = t_best;
  for (int k = 0; k < 3; ++k) {
    double a = (lo[k] - origin[k]) * inv_dir[k];
    double b = (hi[k] - origin[k]) * inv_dir[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  return true;
}

// Moeller-Trumbore, double-sided.
inline bool tri_hit(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                    const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                    double t_min, double t_max, double* t_out) {
  const Eigen::Vector3d e1 = b - a;
  const Eigen::Vector3d e2 = c - a;
  const Eigen::Vector3d pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-14) return false;
  const double inv_det = 1.0 / det;
  const Eigen::Vector3d tvec = origin - a;
  const double u = tvec.dot(pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return false;
  const Eigen::Vector3d qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return false;
  const double t = e2.dot(qvec) * inv_det;
  if (t <= t_min || t >= t_max) return false;
  *t_out = t;
  return true;
}

}  // namespace

RayHit TriangleBvh::raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                            double t_min, double t_max) const {
  RayHit best;
  if (root_ < 0) return best;
  if (nodes_.empty()) throw InvalidInputError("TriangleBvh: raycast before build()");

  const Eigen::Vector3d inv_dir(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());
  best.t = t_max;

  int stack[64];
  int sp = 0;
  stack[sp++] = root_;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    if (!box_hit(origin, inv_dir, node.lo, node.hi, t_min, best.t)) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int t = order_[i];
        double hit_t;
        if (tri_hit(origin, dir, tri_a_[t], tri_b_[t], tri_c_[t], t_min, best.t, &hit_t)) {
          best.hit = true;
          best.t = hit_t;
          best.triangle = t;
        }
      }
      continue;
    }
    stack[sp++] = node.right;
    stack[sp++] = node.left;
  }

  if (best.hit) {
    const int t = best.triangle;
    best.object_id = ids_[t];
    best.point = origin + best.t * dir;
    Eigen::Vector3d n = (tri_b_[t] - tri_a_[t]).cross(tri_c_[t] - tri_a_[t]);
    const double len = n.norm();
    n = len > 0.0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::UnitZ();
    if (n.dot(dir) > 0.0) n = -n;  // face the ray origin
    best.normal = n;
  } else {
    best.t = 0.0;
  }
  return best;
}

}  // namespace scantrack
