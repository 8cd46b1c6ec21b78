#include <doctest.h>

#include <filesystem>
#include <random>

#include "vantage/voxel_grid.hpp"

using namespace vantage;

namespace {

LandmarkCloud unit_cube_cloud() {
  // Landmarks at the cube corners [0,1]^3 so the aabb is exactly the cube.
  std::vector<Landmark> lms;
  int id = 0;
  for (int x : {0, 1})
    for (int y : {0, 1})
      for (int z : {0, 1}) lms.push_back({id++, Vec3(x, y, z)});
  return LandmarkCloud(lms);
}

}  // namespace

TEST_CASE("build_grid: 2x2x2 over the unit cube has the 8 expected centers") {
  VoxelGrid grid = VoxelGrid::build(unit_cube_cloud(), {2, 2, 2}, 0.0);
  REQUIRE(grid.cell_count() == 8);
  for (int x : {0, 1})
    for (int y : {0, 1})
      for (int z : {0, 1}) {
        Vec3 expected(0.25 + 0.5 * x, 0.25 + 0.5 * y, 0.25 + 0.5 * z);
        auto idx = grid.cell_index_at(expected);
        REQUIRE(idx.has_value());
        CHECK((grid.cell(*idx).center - expected).norm() < 1e-12);
      }
}

TEST_CASE("build_grid: single cell sits at the aabb center") {
  VoxelGrid grid = VoxelGrid::build(unit_cube_cloud(), {1, 1, 1}, 0.0);
  REQUIRE(grid.cell_count() == 1);
  CHECK((grid.cell(0).center - Vec3(0.5, 0.5, 0.5)).norm() < 1e-12);
}

TEST_CASE("build_grid: default 8x8x8 yields 512 cells") {
  VoxelGrid grid = VoxelGrid::build(unit_cube_cloud(), {8, 8, 8}, 0.0);
  CHECK(grid.cell_count() == 512);
}

TEST_CASE("build_grid: degenerate axis inflated by margin, rejected at zero") {
  LandmarkCloud flat({{0, Vec3(0, 0, 0)}, {1, Vec3(1, 1, 0)}});  // zero z extent
  CHECK_THROWS_AS(VoxelGrid::build(flat, {2, 2, 2}, 0.0), std::invalid_argument);
  VoxelGrid grid = VoxelGrid::build(flat, {2, 2, 2}, 0.5);
  CHECK(grid.cell_count() == 8);
  CHECK(grid.bounds().extent().z() == doctest::Approx(1.0));
}

TEST_CASE("cell_lookup: centers, outside points, shared faces") {
  VoxelGrid grid = VoxelGrid::build(unit_cube_cloud(), {2, 1, 1}, 0.0);
  // Center containment.
  grid.for_each_cell([&](int64_t index, const VoxelCell& cell) {
    auto found = grid.cell_index_at(cell.center);
    REQUIRE(found.has_value());
    CHECK(*found == index);
  });
  // Outside the volume.
  CHECK_FALSE(grid.cell_index_at(Vec3(-0.1, 0.5, 0.5)).has_value());
  CHECK_FALSE(grid.cell_index_at(Vec3(0.5, 0.5, 1.5)).has_value());
  // A point exactly on the shared face x = 0.5 belongs to the higher cell.
  auto idx = grid.cell_index_at(Vec3(0.5, 0.5, 0.5));
  REQUIRE(idx.has_value());
  CHECK(grid.cell(*idx).coords.x() == 1);
}

TEST_CASE("grid partition: random interior points map to exactly one cell") {
  VoxelGrid grid = VoxelGrid::build(unit_cube_cloud(), {3, 4, 5}, 0.25);
  Aabb bounds = grid.bounds();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-9, 1.0 - 1e-9);
  for (int i = 0; i < 10000; ++i) {
    Vec3 p = bounds.min + bounds.extent().cwiseProduct(Vec3(u(rng), u(rng), u(rng)));
    auto idx = grid.cell_index_at(p);
    REQUIRE(idx.has_value());
    // Membership in exactly one cell: the cell's half-open box contains p.
    const VoxelCell& cell = grid.cell(*idx);
    Vec3 low = bounds.min + grid.cell_size().cwiseProduct(cell.coords.cast<double>());
    Vec3 high = low + grid.cell_size();
    CHECK((p.array() >= low.array()).all());
    CHECK((p.array() < high.array()).all());
  }
}

TEST_CASE("enumerate_viewpoints: cardinality and pose validity") {
  VoxelGrid grid = VoxelGrid::build(unit_cube_cloud(), {2, 2, 2}, 0.0);
  DirectionSet dirs = fibonacci_directions(32);
  size_t count = 0;
  enumerate_viewpoints(grid, dirs, [&](int64_t cell, int dir, const Pose& pose) {
    ++count;
    CHECK((pose.translation() - grid.cell(cell).center).norm() < 1e-12);
    CHECK((pose.rotation() - dirs.rotations[dir]).norm() < 1e-12);
  });
  CHECK(count == 8 * 32);
}

TEST_CASE("grid serialization round-trips scores bit-exactly") {
  VoxelGrid grid = VoxelGrid::build(unit_cube_cloud(), {2, 2, 2}, 0.0);
  grid.set_direction_count(16);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  grid.for_each_cell([&](int64_t, VoxelCell& cell) {
    for (int k = 0; k < 3; ++k)
      cell.orientations.push_back({static_cast<int>(3 * u(rng) * 5), static_cast<int>(u(rng) * 100), u(rng)});
  });
  auto path = std::filesystem::temp_directory_path() / "vantage_grid_roundtrip.vgrid";
  save_grid(grid, path);
  VoxelGrid loaded = load_grid(path);
  REQUIRE(loaded.cell_count() == grid.cell_count());
  CHECK(loaded.direction_count() == 16);
  grid.for_each_cell([&](int64_t index, const VoxelCell& cell) {
    const VoxelCell& other = loaded.cell(index);
    REQUIRE(other.orientations.size() == cell.orientations.size());
    for (size_t i = 0; i < cell.orientations.size(); ++i) {
      CHECK(other.orientations[i].direction_index == cell.orientations[i].direction_index);
      CHECK(other.orientations[i].visible_count == cell.orientations[i].visible_count);
      CHECK(other.orientations[i].score == cell.orientations[i].score);  // bit-exact
    }
  });
}

TEST_CASE("nearest_cell_index clamps to the closest center") {
  VoxelGrid grid = VoxelGrid::build(unit_cube_cloud(), {2, 2, 2}, 0.0);
  int64_t idx = grid.nearest_cell_index(Vec3(-5.0, -5.0, -5.0));
  CHECK((grid.cell(idx).coords.array() == 0).all());
  int64_t idx2 = grid.nearest_cell_index(Vec3(5.0, 0.3, 5.0));
  CHECK(grid.cell(idx2).coords.x() == 1);
  CHECK(grid.cell(idx2).coords.z() == 1);
}
