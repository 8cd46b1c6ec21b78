#pragma once

#include <string>

#include "vantage/geometry.hpp"

namespace vantage {

enum class SceneKind { room_box, cluster_field, wall_corridor };

SceneKind scene_kind_from_name(const std::string& name);
std::string scene_kind_name(SceneKind kind);

/// Synthetic scene recipe. Landmark density is deliberately non-uniform so
/// that viewpoint quality varies across directions.
struct SceneSpec {
  SceneKind kind = SceneKind::room_box;
  int landmark_count = 1000;
  Vec3 extent = Vec3(8.0, 8.0, 3.0);  // meters
  // Density-variation knobs: number of dense patches and the fraction of
  // landmarks concentrated in them.
  int cluster_count = 6;
  double cluster_fraction = 0.7;
  double cluster_sigma = 0.5;  // meters
  double gap_radius = 0.7;     // wall_corridor: radius of the wall opening
  uint64_t seed = 1;

  void validate() const;
};

struct GeneratedScene {
  LandmarkCloud cloud;
  // Dense surface samples for occupancy building (walls etc.); empty for
  // generators without surfaces.
  std::vector<Vec3> dense_samples;
  double suggested_occupancy_edge = 0.15;
};

/// Deterministic under spec.seed.
GeneratedScene generate_scene(const SceneSpec& spec);

}  // namespace vantage
