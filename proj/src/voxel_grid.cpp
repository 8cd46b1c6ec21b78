#include "vantage/voxel_grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vantage/serial.hpp"

namespace vantage {

namespace {
constexpr uint64_t kGridMagic = 0x5647524944303176ull;  // "VGRID01v"
}

VoxelGrid VoxelGrid::build_over(const Aabb& box, const Eigen::Vector3i& resolution) {
  if ((resolution.array() < 1).any())
    throw std::invalid_argument("grid resolution must be >= 1 per axis");
  Vec3 extent = box.extent();
  if ((extent.array() <= 0.0).any())
    throw std::invalid_argument("grid volume is degenerate on an axis");
  VoxelGrid grid;
  grid.origin_ = box.min;
  grid.resolution_ = resolution;
  grid.cell_size_ = extent.cwiseQuotient(resolution.cast<double>());
  grid.cells_.reserve(static_cast<size_t>(resolution.x()) * resolution.y() * resolution.z());
  for (int z = 0; z < resolution.z(); ++z)
    for (int y = 0; y < resolution.y(); ++y)
      for (int x = 0; x < resolution.x(); ++x) {
        VoxelCell cell;
        cell.coords = {x, y, z};
        cell.center = grid.origin_ +
                      grid.cell_size_.cwiseProduct(Vec3(x + 0.5, y + 0.5, z + 0.5));
        grid.cells_.emplace(grid.linear_index(cell.coords), std::move(cell));
      }
  return grid;
}

VoxelGrid VoxelGrid::build(const LandmarkCloud& cloud, const Eigen::Vector3i& resolution,
                           double margin) {
  return build_over(cloud.aabb().inflated(margin), resolution);
}

std::optional<int64_t> VoxelGrid::cell_index_at(const Vec3& position) const {
  Vec3 rel = (position - origin_).cwiseQuotient(cell_size_);
  Eigen::Vector3i c(static_cast<int>(std::floor(rel.x())),
                    static_cast<int>(std::floor(rel.y())),
                    static_cast<int>(std::floor(rel.z())));
  if ((c.array() < 0).any() || (c.array() >= resolution_.array()).any())
    return std::nullopt;
  return linear_index(c);
}

const VoxelCell* VoxelGrid::cell_at(const Vec3& position) const {
  auto idx = cell_index_at(position);
  if (!idx) return nullptr;
  auto it = cells_.find(*idx);
  return it == cells_.end() ? nullptr : &it->second;
}

int64_t VoxelGrid::nearest_cell_index(const Vec3& position) const {
  if (cells_.empty()) throw std::logic_error("empty grid");
  if (auto idx = cell_index_at(position)) return *idx;
  // Clamp to the grid volume; the containing cell of the clamped point is
  // the nearest cell by center distance for an axis-aligned uniform grid.
  Aabb b = bounds();
  Vec3 clamped = position.cwiseMax(b.min).cwiseMin(
      b.max - 1e-9 * cell_size_);  // keep strictly inside the half-open box
  auto idx = cell_index_at(clamped);
  if (idx) return *idx;
  throw std::logic_error("nearest_cell_index: clamp failed");
}

void VoxelGrid::for_each_cell(
    const std::function<void(int64_t, const VoxelCell&)>& fn) const {
  int64_t n = static_cast<int64_t>(cells_.size());
  for (int64_t i = 0; i < n; ++i) fn(i, cells_.at(i));
}

void VoxelGrid::for_each_cell(const std::function<void(int64_t, VoxelCell&)>& fn) {
  int64_t n = static_cast<int64_t>(cells_.size());
  for (int64_t i = 0; i < n; ++i) fn(i, cells_.at(i));
}

void enumerate_viewpoints(
    const VoxelGrid& grid, const DirectionSet& directions,
    const std::function<void(int64_t, int, const Pose&)>& fn) {
  if (grid.cell_count() == 0 || directions.size() == 0)
    throw std::invalid_argument("grid and direction set must be non-empty");
  grid.for_each_cell([&](int64_t index, const VoxelCell& cell) {
    for (size_t d = 0; d < directions.size(); ++d)
      fn(index, static_cast<int>(d), Pose(directions.rotations[d], cell.center));
  });
}

void save_grid(const VoxelGrid& grid, const std::filesystem::path& path) {
  atomic_write_file(path, [&](std::ostream& os) {
    BinaryWriter w(os);
    w.put_u64(kGridMagic);
    w.put_u32(1);  // version
    w.put_f64s(grid.origin().data(), 3);
    w.put_i32(grid.resolution().x());
    w.put_i32(grid.resolution().y());
    w.put_i32(grid.resolution().z());
    w.put_f64s(grid.cell_size().data(), 3);
    w.put_u32(static_cast<uint32_t>(grid.direction_count()));
    w.put_u64(grid.cell_count());
    grid.for_each_cell([&](int64_t, const VoxelCell& cell) {
      w.put_u32(static_cast<uint32_t>(cell.orientations.size()));
      for (const auto& o : cell.orientations) {
        w.put_u32(static_cast<uint32_t>(o.direction_index));
        w.put_u32(static_cast<uint32_t>(o.visible_count));
        w.put_f64(o.score);
      }
    });
  });
}

VoxelGrid load_grid(const std::filesystem::path& path) {
  auto is = open_input(path);
  BinaryReader r(is, path.string());
  if (r.get_u64() != kGridMagic) throw io_error(path.string() + ": not a grid file");
  uint32_t version = r.get_u32();
  if (version != 1) throw io_error(path.string() + ": unsupported grid version");
  Vec3 origin;
  r.get_f64s(origin.data(), 3);
  int32_t rx = r.get_i32();
  int32_t ry = r.get_i32();
  int32_t rz = r.get_i32();
  Eigen::Vector3i res(rx, ry, rz);
  Vec3 cell_size;
  r.get_f64s(cell_size.data(), 3);
  uint32_t dir_count = r.get_u32();
  uint64_t cell_count = r.get_u64();

  Aabb box{origin, origin + cell_size.cwiseProduct(res.cast<double>())};
  VoxelGrid grid = VoxelGrid::build_over(box, res);
  grid.set_direction_count(static_cast<int>(dir_count));
  if (cell_count != grid.cell_count())
    throw io_error(path.string() + ": cell count mismatch");
  grid.for_each_cell([&](int64_t, VoxelCell& cell) {
    uint32_t n = r.get_u32();
    cell.orientations.resize(n);
    for (auto& o : cell.orientations) {
      o.direction_index = static_cast<int>(r.get_u32());
      o.visible_count = static_cast<int>(r.get_u32());
      o.score = r.get_f64();
    }
  });
  return grid;
}

}  // namespace vantage
