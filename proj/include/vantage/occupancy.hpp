#pragma once

#include <cstdint>
#include <filesystem>
#include <unordered_set>
#include <vector>

#include "vantage/geometry.hpp"

namespace vantage {

/// Binary occupancy over a uniform voxel hash at a fine occlusion
/// resolution. Immutable after build; shared read-only across workers.
class OccupancyMap {
 public:
  OccupancyMap() = default;
  explicit OccupancyMap(double cell_edge);

  double cell_edge() const { return cell_edge_; }
  size_t occupied_count() const { return cells_.size(); }

  Eigen::Vector3i voxel_of(const Vec3& p) const {
    return {static_cast<int>(std::floor(p.x() / cell_edge_)),
            static_cast<int>(std::floor(p.y() / cell_edge_)),
            static_cast<int>(std::floor(p.z() / cell_edge_))};
  }

  bool occupied(const Eigen::Vector3i& v) const { return cells_.count(key(v)) != 0; }
  void mark(const Vec3& p) { cells_.insert(key(voxel_of(p))); }
  void mark_voxel(const Eigen::Vector3i& v) { cells_.insert(key(v)); }

  /// Occupied voxel coordinates in ascending key order (deterministic).
  std::vector<Eigen::Vector3i> sorted_voxels() const;

  /// Walks the segment a -> b through the voxel hash (Amanatides-Woo DDA)
  /// and returns the first occupied voxel hit, excluding `exempt` (pass the
  /// target's own voxel for line-of-sight tests). Returns false when the
  /// segment is clear.
  bool segment_hits_occupied(const Vec3& a, const Vec3& b,
                             const Eigen::Vector3i* exempt = nullptr) const;

  /// Conservative dilation for collision checking with a body radius:
  /// a voxel is occupied in the result iff some occupied voxel center lies
  /// within radius + half the voxel diagonal.
  OccupancyMap inflated(double radius) const;

 private:
  static int64_t key(const Eigen::Vector3i& v) {
    // 21 bits per axis, biased; covers +/- 2^20 cells.
    return (static_cast<int64_t>(v.x() + (1 << 20)) << 42) |
           (static_cast<int64_t>(v.y() + (1 << 20)) << 21) |
           static_cast<int64_t>(v.z() + (1 << 20));
  }
  static Eigen::Vector3i unkey(int64_t k) {
    return {static_cast<int>((k >> 42) & 0x1fffff) - (1 << 20),
            static_cast<int>((k >> 21) & 0x1fffff) - (1 << 20),
            static_cast<int>(k & 0x1fffff) - (1 << 20)};
  }

  double cell_edge_ = 0.0;
  std::unordered_set<int64_t> cells_;
};

/// Marks the containing voxel of every input point. Throws
/// std::invalid_argument for an empty input or non-positive edge.
OccupancyMap build_occupancy(const std::vector<Vec3>& points, double cell_edge);
OccupancyMap build_occupancy(const LandmarkCloud& cloud, double cell_edge);

void save_occupancy(const OccupancyMap& map, const std::filesystem::path& path);
OccupancyMap load_occupancy(const std::filesystem::path& path);

}  // namespace vantage
