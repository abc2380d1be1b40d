#pragma once

namespace scantrack::mc {

// Case tables for marching cubes: per-case intersected-edge bitmask and
// edge-index triangle fans (-1 terminated).
extern const int kEdgeTable[256];
extern const int kTriTable[256][16];

}  // namespace scantrack::mc
