#pragma once

#include <filesystem>
#include <string>

#include "vantage/directions.hpp"
#include "vantage/encoding.hpp"
#include "vantage/evaluation.hpp"
#include "vantage/planner.hpp"
#include "vantage/pnp.hpp"
#include "vantage/scene_gen.hpp"

namespace vantage {

struct GridConfig {
  Eigen::Vector3i resolution = Eigen::Vector3i(8, 8, 8);
  double margin = 0.0;
  int directions = 64;
  int keep_k = 10;
  OcclusionMode occlusion = OcclusionMode::none;
  double hpr_gamma = 100.0;
  double occupancy_cell = 0.15;
};

struct SceneSource {
  // Either a cloud file path or a generated scene spec.
  std::filesystem::path cloud_path;  // empty means: generate
  SceneSpec spec;
};

struct PathsConfig {
  std::filesystem::path out_dir = "out";
  std::filesystem::path grid;        // defaults under out_dir
  std::filesystem::path dataset;
  std::filesystem::path model;
  std::filesystem::path report;
  std::filesystem::path csv;
  std::filesystem::path trajectory;
  std::filesystem::path occupancy;
};

struct PlanEndpoints {
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
};

/// Whole-pipeline configuration; every module invariant is validated at
/// parse time and unknown keys are rejected.
struct RunConfig {
  uint64_t seed = 1;
  int workers = 0;  // 0: default_worker_count()
  SceneSource scene;
  PinholeCamera camera{450.0, 450.0, 320.0, 240.0, 640, 480, 0.05, 30.0};
  GridConfig grid;
  EncodingConfig encoding;  // image size filled from camera when 0
  OracleConfig oracle;
  TrainConfig training;
  ThresholdTiers tiers = ThresholdTiers::standard();
  std::vector<int> top_n = {1, 5, 10};
  PlannerParams planner;
  PlanEndpoints endpoints;
  PathsConfig paths;

  int effective_workers() const;
  void validate() const;
};

RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config_json(const std::string& text, const std::string& origin);

}  // namespace vantage
