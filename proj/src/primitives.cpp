#include "scantrack/primitives.hpp"

#include <cmath>

#include "scantrack/errors.hpp"

namespace scantrack {

TriangleMesh make_box(double size_x, double size_y, double size_z) {
  if (!(size_x > 0 && size_y > 0 && size_z > 0)) {
    throw InvalidInputError("make_box: sizes must be positive");
  }
  const double hx = size_x / 2, hy = size_y / 2, hz = size_z / 2;
  TriangleMesh mesh;
  mesh.vertices = {{-hx, -hy, -hz}, {hx, -hy, -hz}, {hx, hy, -hz}, {-hx, hy, -hz},
                   {-hx, -hy, hz},  {hx, -hy, hz},  {hx, hy, hz},  {-hx, hy, hz}};
  // Outward-facing CCW winding per face.
  mesh.triangles = {
      {0, 2, 1}, {0, 3, 2},  // -z
      {4, 5, 6}, {4, 6, 7},  // +z
      {0, 1, 5}, {0, 5, 4},  // -y
      {3, 7, 6}, {3, 6, 2},  // +y
      {0, 4, 7}, {0, 7, 3},  // -x
      {1, 2, 6}, {1, 6, 5},  // +x
  };
  return mesh;
}

TriangleMesh make_cylinder(double radius, double height, int segments) {
  if (!(radius > 0 && height > 0) || segments < 3) {
    throw InvalidInputError("make_cylinder: bad parameters");
  }
  const double hz = height / 2;
  TriangleMesh mesh;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    mesh.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
    mesh.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const int bottom_center = static_cast<int>(mesh.vertices.size());
  mesh.vertices.emplace_back(0, 0, -hz);
  const int top_center = bottom_center + 1;
  mesh.vertices.emplace_back(0, 0, hz);

  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    const int b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
    // side (outward)
    mesh.triangles.emplace_back(b0, b1, t1);
    mesh.triangles.emplace_back(b0, t1, t0);
    // caps
    mesh.triangles.emplace_back(bottom_center, b1, b0);
    mesh.triangles.emplace_back(top_center, t0, t1);
  }
  return mesh;
}

TriangleMesh make_sphere(double radius, int rings, int segments) {
  if (!(radius > 0) || rings < 2 || segments < 3) {
    throw InvalidInputError("make_sphere: bad parameters");
  }
  TriangleMesh mesh;
  mesh.vertices.emplace_back(0, 0, radius);   // north pole: 0
  mesh.vertices.emplace_back(0, 0, -radius);  // south pole: 1
  for (int r = 1; r < rings; ++r) {
    const double phi = M_PI * r / rings;  // polar angle from +z
    for (int s = 0; s < segments; ++s) {
      const double theta = 2.0 * M_PI * s / segments;
      mesh.vertices.emplace_back(radius * std::sin(phi) * std::cos(theta),
                                 radius * std::sin(phi) * std::sin(theta),
                                 radius * std::cos(phi));
    }
  }
  auto ring_vertex = [&](int r, int s) { return 2 + (r - 1) * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) {
    mesh.triangles.emplace_back(0, ring_vertex(1, s), ring_vertex(1, s + 1));
    mesh.triangles.emplace_back(1, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s));
  }
  for (int r = 1; r < rings - 1; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
      const int c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
      mesh.triangles.emplace_back(a, c, d);
      mesh.triangles.emplace_back(a, d, b);
    }
  }
  return mesh;
}

}  // namespace scantrack
