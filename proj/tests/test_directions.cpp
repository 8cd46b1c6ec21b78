#include <doctest.h>

#include <cmath>
#include <set>

#include "vantage/directions.hpp"

using namespace vantage;

TEST_CASE("fibonacci: n = 0 rejected") {
  CHECK_THROWS_AS(fibonacci_directions(0), std::invalid_argument);
}

TEST_CASE("fibonacci: n = 1 uses theta = pi/2 and looks along +z") {
  auto set = fibonacci_directions(1);
  REQUIRE(set.size() == 1);
  // theta_0 = arccos(1 - 2*0.5/1) = arccos(0) = pi/2; the equator point of
  // the lattice is the unrotated forward.
  CHECK((set.forward(0) - Vec3(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("fibonacci: n = 2 polar angles are 60 and 120 degrees") {
  auto set = fibonacci_directions(2);
  REQUIRE(set.size() == 2);
  // cos(theta_i) appears as the +y component of the lattice forward.
  CHECK(set.forward(0).y() == doctest::Approx(std::cos(M_PI / 3.0)));   // 60 deg
  CHECK(set.forward(1).y() == doctest::Approx(std::cos(2 * M_PI / 3.0)));  // 120 deg
}

TEST_CASE("fibonacci: rotations are orthonormal and forwards unit-norm") {
  auto set = fibonacci_directions(129);
  for (size_t i = 0; i < set.size(); ++i) {
    const Mat3& r = set.rotations[i];
    CHECK((r.transpose() * r - Mat3::Identity()).norm() < 1e-12);
    CHECK(std::abs(set.forward(i).norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("fibonacci: forwards pairwise distinct") {
  auto set = fibonacci_directions(256);
  for (size_t i = 0; i < set.size(); ++i)
    for (size_t j = i + 1; j < set.size(); ++j)
      CHECK((set.forward(i) - set.forward(j)).norm() > 1e-6);
}

TEST_CASE("fibonacci: no roll, the camera right vector stays level") {
  // The lattice pole is +y; a roll-free orientation keeps the right vector
  // orthogonal to the pole.
  auto set = fibonacci_directions(64);
  for (const auto& r : set.rotations) CHECK(std::abs(r.col(0).y()) < 1e-12);
}

TEST_CASE("uniformity: fibonacci beats azimuth-elevation at n = 1000") {
  auto fib = fibonacci_directions(1000);
  auto az = azimuth_elevation_directions(1000);
  REQUIRE(fib.size() == 1000);
  REQUIRE(az.size() == 1000);
  double fib_ratio = nearest_neighbor_ratio(fib);
  double az_ratio = nearest_neighbor_ratio(az);
  CHECK(fib_ratio < 2.0);
  CHECK(fib_ratio < az_ratio);
}
