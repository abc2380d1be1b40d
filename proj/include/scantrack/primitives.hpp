#pragma once

#include "scantrack/point_cloud.hpp"

namespace scantrack {

/// Axis-aligned box centered at the origin, outward winding.
TriangleMesh make_box(double size_x, double size_y, double size_z);

/// Cylinder along +z, centered at the origin, with end caps.
TriangleMesh make_cylinder(double radius, double height, int segments = 32);

/// UV sphere centered at the origin.
TriangleMesh make_sphere(double radius, int rings = 16, int segments = 32);

}  // namespace scantrack
