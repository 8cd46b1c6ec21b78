#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "vantage/directions.hpp"
#include "vantage/geometry.hpp"

namespace vantage {

/// One ranked candidate orientation at a camera location.
struct OrientationEntry {
  int direction_index = -1;
  int visible_count = 0;
  double score = 0.0;  // learned viewpoint score, 0 until a model fills it
};

/// A camera location: the cell center plus its ranked candidate
/// orientations (descending visibility, ties to the lower direction index).
struct VoxelCell {
  Eigen::Vector3i coords = Eigen::Vector3i::Zero();
  Vec3 center = Vec3::Zero();
  std::vector<OrientationEntry> orientations;
};

/// Voxel hash of candidate camera locations spanning the landmark bounding
/// box. Every cell of the resolution is present; lookups are O(1) expected.
class VoxelGrid {
 public:
  VoxelGrid() = default;

  const Vec3& origin() const { return origin_; }
  const Eigen::Vector3i& resolution() const { return resolution_; }
  const Vec3& cell_size() const { return cell_size_; }
  size_t cell_count() const { return cells_.size(); }
  int direction_count() const { return direction_count_; }
  void set_direction_count(int n) { direction_count_ = n; }

  int64_t linear_index(const Eigen::Vector3i& c) const {
    return c.x() + static_cast<int64_t>(resolution_.x()) *
                       (c.y() + static_cast<int64_t>(resolution_.y()) * c.z());
  }

  const VoxelCell& cell(int64_t index) const { return cells_.at(index); }
  VoxelCell& cell(int64_t index) { return cells_.at(index); }

  /// Cell containing a world position; cells are half-open boxes
  /// [low, high), so a point on a shared face belongs to the higher-index
  /// cell. Absent outside the grid volume.
  std::optional<int64_t> cell_index_at(const Vec3& position) const;
  const VoxelCell* cell_at(const Vec3& position) const;

  /// Nearest cell by center distance (for off-grid queries). Grid must be
  /// non-empty.
  int64_t nearest_cell_index(const Vec3& position) const;

  /// Visits all cells in ascending linear-index order (deterministic
  /// regardless of hash layout).
  void for_each_cell(const std::function<void(int64_t, const VoxelCell&)>& fn) const;
  void for_each_cell(const std::function<void(int64_t, VoxelCell&)>& fn);

  Aabb bounds() const {
    return {origin_, origin_ + cell_size_.cwiseProduct(resolution_.cast<double>())};
  }

  Pose viewpoint_pose(int64_t cell_index, const DirectionSet& directions,
                      int direction_index) const {
    return Pose(directions.rotations[direction_index], cell(cell_index).center);
  }

  /// Builds the location grid over cloud.aabb inflated by margin. Throws
  /// std::invalid_argument for non-positive resolution or a grid volume that
  /// is degenerate on any axis after inflation.
  static VoxelGrid build(const LandmarkCloud& cloud, const Eigen::Vector3i& resolution,
                         double margin);

  static VoxelGrid build_over(const Aabb& box, const Eigen::Vector3i& resolution);

 private:
  Vec3 origin_ = Vec3::Zero();
  Eigen::Vector3i resolution_ = Eigen::Vector3i::Zero();
  Vec3 cell_size_ = Vec3::Zero();
  std::unordered_map<int64_t, VoxelCell> cells_;
  int direction_count_ = 0;
};

/// Streams every (cell index, direction index, pose) combination without
/// materializing the product. Cells in linear-index order, directions in
/// index order.
void enumerate_viewpoints(
    const VoxelGrid& grid, const DirectionSet& directions,
    const std::function<void(int64_t, int, const Pose&)>& fn);

/// Binary grid container; layout documented in docs/formats.md. Scores
/// round-trip bit-exactly.
void save_grid(const VoxelGrid& grid, const std::filesystem::path& path);
VoxelGrid load_grid(const std::filesystem::path& path);

}  // namespace vantage
