#pragma once

#include <filesystem>
#include <optional>

#include "vantage/occupancy.hpp"
#include "vantage/voxel_grid.hpp"

namespace vantage {

struct PlannerParams {
  double step_size = 0.3;        // meters per tree extension
  double rewire_radius = 0.9;    // neighborhood for parent choice / rewiring
  int max_iterations = 5000;
  double goal_bias = 0.1;        // probability of sampling the goal
  double goal_tolerance = 0.3;   // meters
  double inflation_radius = 0.1; // robot body approximation
  uint64_t seed = 1;

  void validate() const;
};

struct PlanProblem {
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  const OccupancyMap* occupancy = nullptr;  // raw map; inflated internally
  const VoxelGrid* grid = nullptr;          // sampling volume + viewpoint source
  PlannerParams params;
};

struct PlannedPath {
  std::vector<Vec3> positions;  // start .. (within goal tolerance of) goal
  double length = 0.0;
};

/// Position-space RRT*: uniform sampling over the grid volume with goal
/// bias, nearest-neighbor extension by step size, segment collision checks
/// against the inflated occupancy, and rewiring within the radius to
/// minimize path length. Absent when no goal-reaching path is found within
/// max_iterations. Throws std::invalid_argument when start or goal is in
/// collision.
std::optional<PlannedPath> plan(const PlanProblem& problem);

enum class AttachPolicy { best_score, best_score_within_turn_budget };

struct Waypoint {
  Vec3 position = Vec3::Zero();
  Pose pose;            // attached orientation at this position
  double score = 0.0;   // learned score of the attached orientation
  bool off_grid = false;  // nearest-cell fallback was used
};

struct Trajectory {
  std::vector<Waypoint> waypoints;
  double length = 0.0;
};

/// Attaches, at each path position, the containing cell's top-scored
/// orientation (nearest cell when the position falls outside the grid,
/// flagged). Under a turn budget, the highest-scored orientation within
/// `max_turn_deg` of the previous waypoint's orientation is used, falling
/// back to best-score when none qualifies.
Trajectory attach_viewpoints(const std::vector<Vec3>& positions, const VoxelGrid& grid,
                             const DirectionSet& directions,
                             AttachPolicy policy = AttachPolicy::best_score,
                             double max_turn_deg = 180.0);

/// JSON-lines trajectory: one object per waypoint with position, row-major
/// rotation, score. Round-trips exactly; rotations are re-validated on
/// import.
void export_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);
Trajectory import_trajectory(const std::filesystem::path& path);

}  // namespace vantage
