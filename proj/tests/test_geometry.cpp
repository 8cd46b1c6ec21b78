#include <doctest.h>

#include <fstream>
#include <random>

#include "vantage/cloud_io.hpp"
#include "vantage/geometry.hpp"

using namespace vantage;

namespace {

PinholeCamera vga_camera() { return {100.0, 100.0, 320.0, 240.0, 640, 480, 0.1, 100.0}; }

Mat3 random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 axis(u(rng), u(rng), u(rng));
  while (axis.norm() < 1e-6) axis = Vec3(u(rng), u(rng), u(rng));
  std::uniform_real_distribution<double> a(0.0, M_PI);
  return axis_angle_rotation(axis, a(rng));
}

}  // namespace

TEST_CASE("project: optical-axis point maps to the principal point") {
  PinholeCamera cam{1.0, 1.0, 1.0, 1.0, 2, 2, 0.5, 10.0};
  auto px = project(cam, {0.0, 0.0, 1.0});
  REQUIRE(px.has_value());
  CHECK(px->x() == doctest::Approx(1.0));
  CHECK(px->y() == doctest::Approx(1.0));

  // With the principal point at the corner the same ray lands on (0,0).
  PinholeCamera corner{1.0, 1.0, 0.0, 0.0, 2, 2, 0.5, 10.0};
  auto at_origin = project(corner, {0.0, 0.0, 1.0});
  REQUIRE(at_origin.has_value());
  CHECK(at_origin->x() == doctest::Approx(0.0));
  CHECK(at_origin->y() == doctest::Approx(0.0));
}

TEST_CASE("project: behind-camera point is absent") {
  CHECK_FALSE(project(vga_camera(), {0.0, 0.0, -1.0}).has_value());
}

TEST_CASE("project: direct pinhole arithmetic") {
  auto px = project(vga_camera(), {1.0, 2.0, 2.0});
  REQUIRE(px.has_value());
  CHECK(px->x() == doctest::Approx(370.0));
  CHECK(px->y() == doctest::Approx(340.0));
}

TEST_CASE("project: out-of-bounds and depth clipping are absent, not errors") {
  PinholeCamera cam = vga_camera();
  CHECK_FALSE(project(cam, {100.0, 0.0, 1.0}).has_value());   // off-image
  CHECK_FALSE(project(cam, {0.0, 0.0, 0.05}).has_value());    // nearer than near
  CHECK_FALSE(project(cam, {0.0, 0.0, 1000.0}).has_value());  // beyond far
}

TEST_CASE("transform_into_camera basics") {
  Pose identity;
  CHECK((transform_into_camera(identity, {1, 2, 3}) - Vec3(1, 2, 3)).norm() < 1e-15);

  Pose shifted(Mat3::Identity(), Vec3(1, 0, 0));
  CHECK(transform_into_camera(shifted, {1, 0, 0}).norm() < 1e-15);

  Pose rot(rotation_z(M_PI / 2.0), Vec3::Zero());
  Vec3 out = transform_into_camera(rot, {1, 0, 0});
  CHECK((out - Vec3(0, -1, 0)).norm() < 1e-12);
}

TEST_CASE("pose invariants: orthonormality is validated on construction") {
  Mat3 bad = Mat3::Identity();
  bad(0, 1) = 1e-3;
  CHECK_THROWS_AS(Pose(bad, Vec3::Zero()), std::invalid_argument);

  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;  // orthogonal, det -1
  CHECK_THROWS_AS(Pose(reflection, Vec3::Zero()), std::invalid_argument);
}

TEST_CASE("pose_error: identical, translation-only, rotation-only") {
  Pose a(rotation_y(0.3), Vec3(1, 2, 3));
  auto zero = pose_error(a, a);
  CHECK(zero.translation_m == doctest::Approx(0.0));
  CHECK(zero.rotation_deg == doctest::Approx(0.0));

  Pose b(rotation_y(0.3), Vec3(1.3, 2.0, 3.4));
  CHECK(pose_error(a, b).translation_m == doctest::Approx(0.5));
  CHECK(pose_error(a, b).rotation_deg == doctest::Approx(0.0).epsilon(1e-9));

  // 10 degrees about an arbitrary axis -> geodesic angle 10 degrees.
  Vec3 axis = Vec3(1, 2, -0.5).normalized();
  Pose c(rotation_y(0.3) * axis_angle_rotation(axis, 10.0 * M_PI / 180.0), a.translation());
  auto err = pose_error(a, c);
  CHECK(err.translation_m == doctest::Approx(0.0));
  CHECK(err.rotation_deg == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("pose_error is symmetric and round-trip transform is identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    Pose a(random_rotation(rng), Vec3(u(rng), u(rng), u(rng)));
    Pose b(random_rotation(rng), Vec3(u(rng), u(rng), u(rng)));
    auto ab = pose_error(a, b);
    auto ba = pose_error(b, a);
    CHECK(std::abs(ab.translation_m - ba.translation_m) < 1e-9);
    CHECK(std::abs(ab.rotation_deg - ba.rotation_deg) < 1e-9);

    Vec3 p(u(rng), u(rng), u(rng));
    Vec3 round = a.world_to_camera(a.camera_to_world(p));
    CHECK((round - p).norm() < 1e-9);

    Mat3 prod = a.rotation() * b.rotation();
    CHECK((prod.transpose() * prod - Mat3::Identity()).norm() < 1e-6);
  }
}

TEST_CASE("project/unproject at known depth is identity") {
  PinholeCamera cam = vga_camera();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Vec3 pc((u(rng) - 0.5) * 2.0, (u(rng) - 0.5) * 2.0, 0.5 + 5.0 * u(rng));
    auto px = project(cam, pc);
    if (!px) continue;
    Vec3 back((px->x() - cam.cx) / cam.fx * pc.z(), (px->y() - cam.cy) / cam.fy * pc.z(),
              pc.z());
    CHECK((back - pc).norm() < 1e-6);
  }
}

TEST_CASE("cloud: empty rejected, duplicate ids rejected, aabb covers all") {
  CHECK_THROWS_AS(LandmarkCloud(std::vector<Landmark>{}), std::invalid_argument);
  CHECK_THROWS_AS(LandmarkCloud({{1, Vec3(0, 0, 0)}, {1, Vec3(1, 1, 1)}}),
                  std::invalid_argument);

  LandmarkCloud cloud({{0, Vec3(-1, 0, 2)}, {1, Vec3(3, -2, 0)}, {2, Vec3(0, 5, 1)}});
  for (const auto& lm : cloud.landmarks()) CHECK(cloud.aabb().contains(lm.position));
}

TEST_CASE("cloud io: jsonl and ply round trips") {
  LandmarkCloud cloud({{0, Vec3(0.125, -3.5, 2.0e-7)},
                       {1, Vec3(1.0 / 3.0, 2.0, -1.0)},
                       {2, Vec3(9.25, 0.0, 4.75)}});
  auto dir = std::filesystem::temp_directory_path() / "vantage_cloud_io";
  std::filesystem::create_directories(dir);

  for (const char* name : {"cloud.jsonl", "cloud.ply"}) {
    auto path = dir / name;
    save_cloud(cloud, path);
    LandmarkCloud loaded = load_cloud(path);
    REQUIRE(loaded.size() == cloud.size());
    for (size_t i = 0; i < cloud.size(); ++i) {
      CHECK(loaded[i].id == cloud[i].id);
      CHECK(loaded[i].position == cloud[i].position);  // bit-exact round trip
    }
  }
}

TEST_CASE("cloud io: hand-written ply parses with sequential ids") {
  auto dir = std::filesystem::temp_directory_path() / "vantage_cloud_io";
  std::filesystem::create_directories(dir);
  auto path = dir / "hand.ply";
  {
    std::ofstream os(path);
    os << "ply\nformat ascii 1.0\ncomment made by hand\n"
       << "element vertex 5\n"
       << "property float x\nproperty float y\nproperty float z\n"
       << "end_header\n"
       << "0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 1\n";
  }
  LandmarkCloud cloud = load_cloud(path);
  REQUIRE(cloud.size() == 5);
  for (size_t i = 0; i < 5; ++i) CHECK(cloud[i].id == static_cast<int64_t>(i));
  CHECK((cloud[4].position - Vec3(1, 1, 1)).norm() == 0.0);
}

TEST_CASE("cloud io: zero-point file is an error") {
  auto dir = std::filesystem::temp_directory_path() / "vantage_cloud_io";
  std::filesystem::create_directories(dir);
  auto path = dir / "empty.ply";
  {
    std::ofstream os(path);
    os << "ply\nformat ascii 1.0\nelement vertex 0\n"
       << "property float x\nproperty float y\nproperty float z\nend_header\n";
  }
  CHECK_THROWS(load_cloud(path));

  auto jpath = dir / "empty.jsonl";
  { std::ofstream os(jpath); }
  CHECK_THROWS(load_cloud(jpath));
}
