#pragma once

#include <vector>

#include "vantage/geometry.hpp"

namespace vantage {

struct HullResult {
  // True when the input has fewer than 4 points or is degenerate
  // (collinear/coplanar within tolerance); vertex set is empty then.
  bool degenerate = false;
  // Indices into the input that are vertices of the convex hull.
  std::vector<int> vertices;
};

/// 3D convex hull by incremental insertion. Returns the hull vertex set;
/// points interior to faces or edges are not vertices. Tolerance scales
/// with the input extent.
HullResult convex_hull_vertices(const std::vector<Vec3>& points);

}  // namespace vantage
