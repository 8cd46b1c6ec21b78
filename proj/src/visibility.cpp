#include "vantage/visibility.hpp"

#include <algorithm>
#include <stdexcept>

#include "vantage/convex_hull.hpp"
#include "vantage/parallel.hpp"

namespace vantage {

VisibilityRecord visible_landmarks_unoccluded(const LandmarkCloud& cloud,
                                              const PinholeCamera& camera,
                                              const Pose& pose) {
  VisibilityRecord record;
  record.visible.reserve(cloud.size() / 4);
  // R^T and -R^T t once; the per-landmark loop is the hot path of the whole
  // sampling stage.
  Mat3 rcw = pose.rotation().transpose();
  Vec3 tcw = -(rcw * pose.translation());
  for (const auto& lm : cloud.landmarks()) {
    Vec3 pc = rcw * lm.position + tcw;
    double z = pc.z();
    if (z < camera.near || z > camera.far) continue;
    double u = camera.fx * pc.x() / z + camera.cx;
    if (u < 0.0 || u >= camera.width) continue;
    double v = camera.fy * pc.y() / z + camera.cy;
    if (v < 0.0 || v >= camera.height) continue;
    record.visible.push_back({lm.id, {u, v}, z, pc});
  }
  return record;
}

namespace {

// Count-only twin of visible_landmarks_unoccluded for ranking without
// occlusion filtering; avoids materializing observations.
int count_visible(const LandmarkCloud& cloud, const PinholeCamera& camera,
                  const Pose& pose) {
  Mat3 rcw = pose.rotation().transpose();
  Vec3 tcw = -(rcw * pose.translation());
  int count = 0;
  for (const auto& lm : cloud.landmarks()) {
    Vec3 pc = rcw * lm.position + tcw;
    double z = pc.z();
    if (z < camera.near || z > camera.far) continue;
    double u = camera.fx * pc.x() / z + camera.cx;
    if (u < 0.0 || u >= camera.width) continue;
    double v = camera.fy * pc.y() / z + camera.cy;
    if (v < 0.0 || v >= camera.height) continue;
    ++count;
  }
  return count;
}

}  // namespace

VisibilityRecord hpr_filter(const VisibilityRecord& record, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("hpr gamma must be positive");
  if (record.visible.size() < 4) return record;

  double max_norm = 0.0;
  for (const auto& obs : record.visible)
    max_norm = std::max(max_norm, obs.point_cam.norm());
  if (max_norm <= 0.0) return record;
  const double radius = gamma * max_norm;

  // Spherical flipping: p' = p + 2 (R - |p|) p / |p|, camera at the origin.
  std::vector<Vec3> flipped;
  flipped.reserve(record.visible.size() + 1);
  for (const auto& obs : record.visible) {
    double norm = obs.point_cam.norm();
    if (norm <= 0.0) {
      flipped.push_back(Vec3::Zero());
      continue;
    }
    flipped.push_back(obs.point_cam + 2.0 * (radius - norm) * obs.point_cam / norm);
  }
  flipped.push_back(Vec3::Zero());  // the camera origin joins the hull

  HullResult hull = convex_hull_vertices(flipped);
  if (hull.degenerate) return record;

  VisibilityRecord out;
  out.cell_index = record.cell_index;
  out.direction_index = record.direction_index;
  out.visible.reserve(hull.vertices.size());
  const int origin_index = static_cast<int>(flipped.size()) - 1;
  for (int vi : hull.vertices) {
    if (vi == origin_index) continue;
    out.visible.push_back(record.visible[vi]);
  }
  return out;
}

VisibilityRecord occlusion_filter(const VisibilityRecord& record,
                                  const OccupancyMap& occupancy, const Pose& pose) {
  VisibilityRecord out;
  out.cell_index = record.cell_index;
  out.direction_index = record.direction_index;
  out.visible.reserve(record.visible.size());
  const Vec3& origin = pose.translation();
  for (const auto& obs : record.visible) {
    Vec3 world = pose.camera_to_world(obs.point_cam);
    Eigen::Vector3i terminal = occupancy.voxel_of(world);
    if (!occupancy.segment_hits_occupied(origin, world, &terminal))
      out.visible.push_back(obs);
  }
  return out;
}

VisibilityRecord build_record(const LandmarkCloud& cloud, const PinholeCamera& camera,
                              const Pose& pose, const VisibilityParams& params,
                              int64_t cell_index, int direction_index) {
  VisibilityRecord record = visible_landmarks_unoccluded(cloud, camera, pose);
  record.cell_index = cell_index;
  record.direction_index = direction_index;
  switch (params.mode) {
    case OcclusionMode::none:
      break;
    case OcclusionMode::hpr:
      record = hpr_filter(record, params.hpr_gamma);
      break;
    case OcclusionMode::occupancy:
      if (!params.occupancy)
        throw std::invalid_argument("occupancy mode requires an occupancy map");
      record = occlusion_filter(record, *params.occupancy, pose);
      break;
  }
  record.cell_index = cell_index;
  record.direction_index = direction_index;
  return record;
}

void rank_orientations(VoxelGrid& grid, const LandmarkCloud& cloud,
                       const PinholeCamera& camera, const DirectionSet& directions,
                       const VisibilityParams& params, int keep_k, int workers) {
  if (keep_k < 1) throw std::invalid_argument("keep_k must be >= 1");
  if (params.mode == OcclusionMode::occupancy && !params.occupancy)
    throw std::invalid_argument("occupancy mode requires an occupancy map");
  const size_t n_cells = grid.cell_count();
  const size_t n_dirs = directions.size();
  grid.set_direction_count(static_cast<int>(n_dirs));

  std::vector<std::vector<OrientationEntry>> ranked(n_cells);
  parallel_for(n_cells, workers, [&](size_t ci) {
    const VoxelCell& cell = grid.cell(static_cast<int64_t>(ci));
    std::vector<OrientationEntry> entries(n_dirs);
    for (size_t d = 0; d < n_dirs; ++d) {
      Pose pose(directions.rotations[d], cell.center);
      int count;
      if (params.mode == OcclusionMode::none) {
        count = count_visible(cloud, camera, pose);
      } else {
        VisibilityRecord rec =
            build_record(cloud, camera, pose, params, static_cast<int64_t>(ci),
                         static_cast<int>(d));
        count = static_cast<int>(rec.visible.size());
      }
      entries[d] = {static_cast<int>(d), count, 0.0};
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const OrientationEntry& a, const OrientationEntry& b) {
                       if (a.visible_count != b.visible_count)
                         return a.visible_count > b.visible_count;
                       return a.direction_index < b.direction_index;
                     });
    entries.resize(std::min<size_t>(entries.size(), static_cast<size_t>(keep_k)));
    ranked[ci] = std::move(entries);
  });

  grid.for_each_cell([&](int64_t index, VoxelCell& cell) {
    cell.orientations = std::move(ranked[static_cast<size_t>(index)]);
  });
}

}  // namespace vantage
