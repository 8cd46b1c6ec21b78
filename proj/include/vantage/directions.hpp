#pragma once

#include <vector>

#include "vantage/geometry.hpp"

namespace vantage {

/// A discrete set of roll-free camera orientations. Forward vector of entry
/// i is rotations[i] * (0,0,1).
struct DirectionSet {
  std::vector<Mat3> rotations;

  size_t size() const { return rotations.size(); }
  Vec3 forward(size_t i) const { return rotations[i].col(2); }
};

/// Spherical Fibonacci direction sampling. Polar angles follow the lattice
/// form theta_i = arccos(1 - 2(i+0.5)/n); azimuths advance by the golden
/// angle, phi_i = i*pi*(1+sqrt(5)) reduced mod 2*pi. Each orientation is the
/// x-axis tilt by (theta_i - pi/2) followed by the y-axis pan by phi_i, so
/// forward vectors form the standard Fibonacci lattice (pole on +y) and the
/// camera horizon stays level: no roll about the optical axis.
/// Throws std::invalid_argument for n = 0.
DirectionSet fibonacci_directions(size_t n);

/// Classic equal-step azimuth-elevation sampling of the same parameter
/// ranges. Kept solely as the uniformity baseline; it clusters near the
/// poles.
DirectionSet azimuth_elevation_directions(size_t n);

/// Ratio of maximum to minimum nearest-neighbor geodesic distance among the
/// forward vectors. 1.0 is perfectly even spacing.
double nearest_neighbor_ratio(const DirectionSet& dirs);

}  // namespace vantage
