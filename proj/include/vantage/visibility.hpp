#pragma once

#include <cstdint>
#include <vector>

#include "vantage/geometry.hpp"
#include "vantage/occupancy.hpp"
#include "vantage/voxel_grid.hpp"

namespace vantage {

/// One landmark observation from a candidate viewpoint.
struct Observation {
  int64_t landmark_id = 0;
  Vec2 pixel = Vec2::Zero();
  double depth = 0.0;
  Vec3 point_cam = Vec3::Zero();
};

/// The visible landmark set of one (cell, direction) viewpoint.
struct VisibilityRecord {
  int64_t cell_index = -1;
  int direction_index = -1;
  std::vector<Observation> visible;
};

enum class OcclusionMode { none, hpr, occupancy };

/// Frustum-only visibility: landmarks whose camera-frame depth lies in
/// [near, far] and whose projection falls inside the image. No occlusion
/// reasoning.
VisibilityRecord visible_landmarks_unoccluded(const LandmarkCloud& cloud,
                                              const PinholeCamera& camera,
                                              const Pose& pose);

/// Sparse hidden point removal (spherical flipping + convex hull). Keeps the
/// observations whose flipped camera-frame points are hull vertices of the
/// flipped set plus the camera origin. The flip radius is
/// gamma * max camera-frame norm. Records with a degenerate hull (< 4
/// non-coplanar points) pass through unchanged.
VisibilityRecord hpr_filter(const VisibilityRecord& record, double gamma);

/// Dense-model occlusion: keeps an observation iff the voxel walk from the
/// camera center to the landmark hits no occupied voxel other than the
/// landmark's own.
VisibilityRecord occlusion_filter(const VisibilityRecord& record,
                                  const OccupancyMap& occupancy, const Pose& pose);

struct VisibilityParams {
  OcclusionMode mode = OcclusionMode::none;
  double hpr_gamma = 100.0;
  const OccupancyMap* occupancy = nullptr;  // required for mode occupancy
};

/// Builds the record for one viewpoint under the configured occlusion mode.
VisibilityRecord build_record(const LandmarkCloud& cloud, const PinholeCamera& camera,
                              const Pose& pose, const VisibilityParams& params,
                              int64_t cell_index = -1, int direction_index = -1);

/// Evaluates every (cell, direction) viewpoint and stores each cell's top
/// keep_k directions by post-occlusion visible count (descending; ties to
/// the lower direction index). Cells are processed independently by
/// `workers` threads; results are identical for any worker count.
void rank_orientations(VoxelGrid& grid, const LandmarkCloud& cloud,
                       const PinholeCamera& camera, const DirectionSet& directions,
                       const VisibilityParams& params, int keep_k, int workers = 1);

}  // namespace vantage
