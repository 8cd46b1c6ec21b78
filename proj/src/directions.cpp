#include "vantage/directions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vantage {

DirectionSet fibonacci_directions(size_t n) {
  if (n == 0) throw std::invalid_argument("direction count must be >= 1");
  DirectionSet set;
  set.rotations.reserve(n);
  const double golden = M_PI * (1.0 + std::sqrt(5.0));
  for (size_t i = 0; i < n; ++i) {
    double theta = std::acos(1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
    double phi = std::fmod(static_cast<double>(i) * golden, 2.0 * M_PI);
    set.rotations.push_back(rotation_y(phi) * rotation_x(theta - M_PI / 2.0));
  }
  return set;
}

DirectionSet azimuth_elevation_directions(size_t n) {
  if (n == 0) throw std::invalid_argument("direction count must be >= 1");
  // Equal-angle grid with ~sqrt(n/2) elevation rows, truncated to exactly n.
  size_t rows = std::max<size_t>(1, static_cast<size_t>(std::lround(std::sqrt(static_cast<double>(n) / 2.0))));
  size_t cols = (n + rows - 1) / rows;
  DirectionSet set;
  set.rotations.reserve(n);
  for (size_t r = 0; r < rows && set.rotations.size() < n; ++r) {
    double theta = M_PI * (static_cast<double>(r) + 0.5) / static_cast<double>(rows);
    for (size_t c = 0; c < cols && set.rotations.size() < n; ++c) {
      double phi = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(cols);
      set.rotations.push_back(rotation_y(phi) * rotation_x(theta - M_PI / 2.0));
    }
  }
  return set;
}

double nearest_neighbor_ratio(const DirectionSet& dirs) {
  size_t n = dirs.size();
  if (n < 2) return 1.0;
  std::vector<Vec3> fwd(n);
  for (size_t i = 0; i < n; ++i) fwd[i] = dirs.forward(i);
  double min_nn = std::numeric_limits<double>::infinity();
  double max_nn = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double c = std::clamp(fwd[i].dot(fwd[j]), -1.0, 1.0);
      best = std::min(best, std::acos(c));
    }
    min_nn = std::min(min_nn, best);
    max_nn = std::max(max_nn, best);
  }
  return max_nn / min_nn;
}

}  // namespace vantage
