#include "vantage/planner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "vantage/serial.hpp"

namespace vantage {

void PlannerParams::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("step size must be > 0");
  if (!(rewire_radius > 0.0)) throw std::invalid_argument("rewire radius must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("max iterations must be >= 1");
  if (!(goal_bias >= 0.0 && goal_bias < 1.0))
    throw std::invalid_argument("goal bias must lie in [0, 1)");
  if (!(goal_tolerance > 0.0)) throw std::invalid_argument("goal tolerance must be > 0");
  if (inflation_radius < 0.0) throw std::invalid_argument("inflation radius must be >= 0");
}

namespace {

struct Node {
  Vec3 position;
  int parent = -1;
  double cost = 0.0;
};

std::vector<Vec3> extract_path(const std::vector<Node>& nodes, int leaf) {
  std::vector<Vec3> path;
  for (int i = leaf; i >= 0; i = nodes[i].parent) path.push_back(nodes[i].position);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::optional<PlannedPath> plan(const PlanProblem& problem) {
  problem.params.validate();
  if (!problem.grid) throw std::invalid_argument("plan problem needs a grid");
  const PlannerParams& p = problem.params;

  OccupancyMap inflated;
  const OccupancyMap* occ = nullptr;
  if (problem.occupancy) {
    inflated = problem.occupancy->inflated(p.inflation_radius);
    occ = &inflated;
  }
  auto segment_free = [&](const Vec3& a, const Vec3& b) {
    return !occ || !occ->segment_hits_occupied(a, b);
  };
  auto point_free = [&](const Vec3& pt) {
    return !occ || !occ->occupied(occ->voxel_of(pt));
  };

  if (!point_free(problem.start))
    throw std::invalid_argument("start position is in collision");
  if (!point_free(problem.goal))
    throw std::invalid_argument("goal position is in collision");

  if ((problem.start - problem.goal).norm() <= 1e-12)
    return PlannedPath{{problem.start}, 0.0};

  Aabb volume = problem.grid->bounds();
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Node> nodes;
  nodes.reserve(p.max_iterations + 1);
  nodes.push_back({problem.start, -1, 0.0});
  std::vector<std::vector<int>> children(1);
  std::vector<int> goal_nodes;

  for (int iter = 0; iter < p.max_iterations; ++iter) {
    Vec3 sample;
    if (unit(rng) < p.goal_bias) {
      sample = problem.goal;
    } else {
      sample = Vec3(volume.min.x() + unit(rng) * (volume.max.x() - volume.min.x()),
                    volume.min.y() + unit(rng) * (volume.max.y() - volume.min.y()),
                    volume.min.z() + unit(rng) * (volume.max.z() - volume.min.z()));
    }

    // Nearest node (linear scan; tree sizes here stay modest).
    int nearest = 0;
    double nearest_d2 = (nodes[0].position - sample).squaredNorm();
    for (size_t i = 1; i < nodes.size(); ++i) {
      double d2 = (nodes[i].position - sample).squaredNorm();
      if (d2 < nearest_d2) {
        nearest_d2 = d2;
        nearest = static_cast<int>(i);
      }
    }

    Vec3 from = nodes[nearest].position;
    Vec3 to = sample;
    double dist = (to - from).norm();
    if (dist < 1e-12) continue;
    if (dist > p.step_size) to = from + (to - from) * (p.step_size / dist);

    if (!segment_free(from, to)) continue;

    // Choose the cheapest collision-free parent within the rewire radius.
    double r2 = p.rewire_radius * p.rewire_radius;
    int parent = nearest;
    double base = (to - from).norm();
    double new_cost = nodes[nearest].cost + base;
    std::vector<int> neighbors;
    for (size_t i = 0; i < nodes.size(); ++i) {
      double d2 = (nodes[i].position - to).squaredNorm();
      if (d2 <= r2) neighbors.push_back(static_cast<int>(i));
    }
    for (int ni : neighbors) {
      double c = nodes[ni].cost + (nodes[ni].position - to).norm();
      if (c < new_cost && segment_free(nodes[ni].position, to)) {
        new_cost = c;
        parent = ni;
      }
    }

    int node_id = static_cast<int>(nodes.size());
    nodes.push_back({to, parent, new_cost});
    children.emplace_back();
    children[parent].push_back(node_id);

    // Rewire neighbors through the new node when it shortens them; the
    // improvement propagates down each rewired subtree.
    for (int ni : neighbors) {
      double through = new_cost + (nodes[ni].position - to).norm();
      if (through + 1e-12 < nodes[ni].cost &&
          segment_free(to, nodes[ni].position)) {
        int old_parent = nodes[ni].parent;
        if (old_parent >= 0) {
          auto& sib = children[old_parent];
          sib.erase(std::find(sib.begin(), sib.end(), ni));
        }
        nodes[ni].parent = node_id;
        children[node_id].push_back(ni);
        double delta = nodes[ni].cost - through;
        nodes[ni].cost = through;
        std::vector<int> stack(children[ni]);
        while (!stack.empty()) {
          int cur = stack.back();
          stack.pop_back();
          nodes[cur].cost -= delta;
          stack.insert(stack.end(), children[cur].begin(), children[cur].end());
        }
      }
    }

    if ((to - problem.goal).norm() <= p.goal_tolerance) goal_nodes.push_back(node_id);
  }

  if (goal_nodes.empty()) return std::nullopt;
  int best = goal_nodes.front();
  for (int g : goal_nodes)
    if (nodes[g].cost < nodes[best].cost) best = g;
  PlannedPath path;
  path.positions = extract_path(nodes, best);
  path.length = nodes[best].cost;
  return path;
}

Trajectory attach_viewpoints(const std::vector<Vec3>& positions, const VoxelGrid& grid,
                             const DirectionSet& directions, AttachPolicy policy,
                             double max_turn_deg) {
  Trajectory traj;
  traj.waypoints.reserve(positions.size());
  const Waypoint* previous = nullptr;
  for (const auto& pos : positions) {
    Waypoint wp;
    wp.position = pos;
    auto idx = grid.cell_index_at(pos);
    if (!idx) {
      idx = grid.nearest_cell_index(pos);
      wp.off_grid = true;
    }
    const VoxelCell& cell = grid.cell(*idx);
    if (cell.orientations.empty())
      throw std::invalid_argument("grid is not ranked: cell without candidates");

    auto best_by_score = [&]() {
      size_t best = 0;
      for (size_t i = 1; i < cell.orientations.size(); ++i) {
        const auto& a = cell.orientations[i];
        const auto& b = cell.orientations[best];
        if (a.score > b.score ||
            (a.score == b.score && a.direction_index < b.direction_index))
          best = i;
      }
      return best;
    };

    size_t chosen;
    if (policy == AttachPolicy::best_score_within_turn_budget && previous) {
      double budget_rad = max_turn_deg * M_PI / 180.0;
      ptrdiff_t best = -1;
      for (size_t i = 0; i < cell.orientations.size(); ++i) {
        const auto& o = cell.orientations[i];
        double turn = rotation_angle(previous->pose.rotation(),
                                     directions.rotations[o.direction_index]);
        if (turn > budget_rad + 1e-12) continue;
        if (best < 0 || o.score > cell.orientations[best].score ||
            (o.score == cell.orientations[best].score &&
             o.direction_index < cell.orientations[best].direction_index))
          best = static_cast<ptrdiff_t>(i);
      }
      chosen = best >= 0 ? static_cast<size_t>(best) : best_by_score();
    } else {
      chosen = best_by_score();
    }

    const auto& o = cell.orientations[chosen];
    wp.pose = Pose(directions.rotations[o.direction_index], pos);
    wp.score = o.score;
    traj.waypoints.push_back(wp);
    previous = &traj.waypoints.back();
  }
  traj.length = 0.0;
  for (size_t i = 1; i < traj.waypoints.size(); ++i)
    traj.length += (traj.waypoints[i].position - traj.waypoints[i - 1].position).norm();
  return traj;
}

void export_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  atomic_write_file(path, [&](std::ostream& os) {
    for (const auto& wp : trajectory.waypoints) {
      nlohmann::json j;
      j["position"] = {wp.position.x(), wp.position.y(), wp.position.z()};
      std::vector<double> rot(9);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot[r * 3 + c] = wp.pose.rotation()(r, c);
      j["rotation"] = rot;
      j["score"] = wp.score;
      j["off_grid"] = wp.off_grid;
      os << j.dump() << '\n';
    }
  });
}

Trajectory import_trajectory(const std::filesystem::path& path) {
  auto is = open_input(path);
  Trajectory traj;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw io_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    Waypoint wp;
    auto pos = j.at("position");
    wp.position = Vec3(pos.at(0), pos.at(1), pos.at(2));
    auto rot = j.at("rotation");
    if (rot.size() != 9)
      throw io_error(path.string() + ":" + std::to_string(lineno) + ": rotation needs 9 entries");
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c) r(i, c) = rot.at(i * 3 + c);
    wp.pose = Pose(r, wp.position);  // re-validates orthonormality
    wp.score = j.at("score");
    wp.off_grid = j.value("off_grid", false);
    traj.waypoints.push_back(wp);
  }
  traj.length = 0.0;
  for (size_t i = 1; i < traj.waypoints.size(); ++i)
    traj.length += (traj.waypoints[i].position - traj.waypoints[i - 1].position).norm();
  return traj;
}

}  // namespace vantage
