#include "vantage/run_config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "vantage/parallel.hpp"
#include "vantage/serial.hpp"

namespace vantage {

namespace {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tracks which keys a section consumed and rejects leftovers.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ~Section() = default;

  template <typename T>
  void get(const char* key, T& out) {
    if (auto it = j_.find(key); it != j_.end()) {
      try {
        out = it->get<T>();
      } catch (const json::exception& e) {
        throw ConfigError(path_ + "." + key + ": " + e.what());
      }
      seen_.insert(key);
    }
  }
  bool has(const char* key) {
    if (j_.contains(key)) {
      seen_.insert(key);
      return true;
    }
    return false;
  }
  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Vec3 parse_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(path + ": expected [x, y, z]");
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

Eigen::Vector3i parse_vec3i(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(path + ": expected [nx, ny, nz]");
  return Eigen::Vector3i(j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>());
}

}  // namespace

int RunConfig::effective_workers() const {
  return workers > 0 ? workers : default_worker_count();
}

void RunConfig::validate() const {
  camera.validate();
  if ((grid.resolution.array() < 1).any())
    throw std::invalid_argument("grid.resolution must be >= 1 per axis");
  if (grid.directions < 1) throw std::invalid_argument("grid.directions must be >= 1");
  if (grid.keep_k < 1) throw std::invalid_argument("grid.keep_k must be >= 1");
  if (!(grid.hpr_gamma > 0.0)) throw std::invalid_argument("grid.hpr_gamma must be > 0");
  if (!(grid.occupancy_cell > 0.0))
    throw std::invalid_argument("grid.occupancy_cell must be > 0");
  encoding.validate();
  oracle.validate();
  training.validate();
  tiers.validate();
  for (int n : top_n)
    if (n < 1) throw std::invalid_argument("top_n entries must be >= 1");
  planner.validate();
  if (scene.cloud_path.empty()) scene.spec.validate();
}

RunConfig parse_run_config_json(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }

  RunConfig config;
  Section top(root, origin);
  top.get("seed", config.seed);
  top.get("workers", config.workers);
  // Sections may override these below (e.g. planner.planner_seed).
  config.planner.seed = config.seed;
  config.training.seed = config.seed;
  config.scene.spec.seed = config.seed;

  if (top.has("scene")) {
    Section s(top.raw("scene"), origin + ".scene");
    std::string cloud, kind = scene_kind_name(config.scene.spec.kind);
    s.get("cloud", cloud);
    config.scene.cloud_path = cloud;
    s.get("generator", kind);
    config.scene.spec.kind = scene_kind_from_name(kind);
    s.get("landmarks", config.scene.spec.landmark_count);
    if (s.has("extent"))
      config.scene.spec.extent = parse_vec3(s.raw("extent"), origin + ".scene.extent");
    s.get("clusters", config.scene.spec.cluster_count);
    s.get("cluster_fraction", config.scene.spec.cluster_fraction);
    s.get("cluster_sigma", config.scene.spec.cluster_sigma);
    s.get("gap_radius", config.scene.spec.gap_radius);
    s.get("scene_seed", config.scene.spec.seed);
    s.finish();
  }

  if (top.has("camera")) {
    Section s(top.raw("camera"), origin + ".camera");
    s.get("fx", config.camera.fx);
    s.get("fy", config.camera.fy);
    s.get("cx", config.camera.cx);
    s.get("cy", config.camera.cy);
    s.get("width", config.camera.width);
    s.get("height", config.camera.height);
    s.get("near", config.camera.near);
    s.get("far", config.camera.far);
    s.finish();
  }

  if (top.has("grid")) {
    Section s(top.raw("grid"), origin + ".grid");
    if (s.has("resolution"))
      config.grid.resolution =
          parse_vec3i(s.raw("resolution"), origin + ".grid.resolution");
    s.get("margin", config.grid.margin);
    s.get("directions", config.grid.directions);
    s.get("keep_k", config.grid.keep_k);
    if (s.has("visibility_mode")) {
      std::string mode = s.raw("visibility_mode").get<std::string>();
      if (mode == "none")
        config.grid.occlusion = OcclusionMode::none;
      else if (mode == "hpr")
        config.grid.occlusion = OcclusionMode::hpr;
      else if (mode == "occupancy")
        config.grid.occlusion = OcclusionMode::occupancy;
      else
        throw ConfigError(origin + ".grid.visibility_mode: unknown mode '" + mode + "'");
    }
    s.get("hpr_gamma", config.grid.hpr_gamma);
    s.get("occupancy_cell", config.grid.occupancy_cell);
    s.finish();
  }

  if (top.has("encoding")) {
    Section s(top.raw("encoding"), origin + ".encoding");
    s.get("bins_u", config.encoding.bins_u);
    s.get("bins_v", config.encoding.bins_v);
    if (s.has("channels"))
      config.encoding.channels =
          channels_from_name(s.raw("channels").get<std::string>());
    s.finish();
  }

  if (top.has("oracle")) {
    Section s(top.raw("oracle"), origin + ".oracle");
    s.get("pixel_noise", config.oracle.pixel_noise);
    s.get("outlier_fraction", config.oracle.outlier_fraction);
    s.get("ransac_iterations", config.oracle.ransac_iterations);
    s.get("inlier_threshold_px", config.oracle.inlier_threshold_px);
    s.get("min_correspondences", config.oracle.min_correspondences);
    s.get("success_translation_m", config.oracle.success_translation_m);
    s.get("success_rotation_deg", config.oracle.success_rotation_deg);
    s.finish();
  }

  if (top.has("training")) {
    Section s(top.raw("training"), origin + ".training");
    s.get("learning_rate", config.training.learning_rate);
    s.get("epochs", config.training.epochs);
    s.get("batch_size", config.training.batch_size);
    s.get("dropout", config.training.dropout);
    s.get("l2_lambda", config.training.l2_lambda);
    s.get("hidden", config.training.hidden_size);
    s.get("positive_weight", config.training.positive_weight);
    s.get("negative_weight", config.training.negative_weight);
    s.get("rebalance", config.training.rebalance);
    s.finish();
  }

  if (top.has("eval")) {
    Section s(top.raw("eval"), origin + ".eval");
    if (s.has("tiers")) {
      const json& jt = s.raw("tiers");
      if (!jt.is_array()) throw ConfigError(origin + ".eval.tiers: expected an array");
      config.tiers.tiers.clear();
      for (const auto& pair : jt) {
        if (!pair.is_array() || pair.size() != 2)
          throw ConfigError(origin + ".eval.tiers: each tier is [meters, degrees]");
        config.tiers.tiers.emplace_back(pair.at(0).get<double>(),
                                        pair.at(1).get<double>());
      }
    }
    s.get("top_n", config.top_n);
    s.finish();
  }

  if (top.has("planner")) {
    Section s(top.raw("planner"), origin + ".planner");
    s.get("step", config.planner.step_size);
    s.get("rewire_radius", config.planner.rewire_radius);
    s.get("max_iterations", config.planner.max_iterations);
    s.get("goal_bias", config.planner.goal_bias);
    s.get("goal_tolerance", config.planner.goal_tolerance);
    s.get("inflation_radius", config.planner.inflation_radius);
    s.get("planner_seed", config.planner.seed);
    if (s.has("start"))
      config.endpoints.start = parse_vec3(s.raw("start"), origin + ".planner.start");
    if (s.has("goal"))
      config.endpoints.goal = parse_vec3(s.raw("goal"), origin + ".planner.goal");
    s.finish();
  }

  if (top.has("paths")) {
    Section s(top.raw("paths"), origin + ".paths");
    auto get_path = [&](const char* key, std::filesystem::path& out) {
      std::string v;
      s.get(key, v);
      if (!v.empty()) out = v;
    };
    get_path("out_dir", config.paths.out_dir);
    get_path("grid", config.paths.grid);
    get_path("dataset", config.paths.dataset);
    get_path("model", config.paths.model);
    get_path("report", config.paths.report);
    get_path("csv", config.paths.csv);
    get_path("trajectory", config.paths.trajectory);
    get_path("occupancy", config.paths.occupancy);
    s.finish();
  }

  top.finish();

  // Derived defaults.
  config.encoding.image_width = config.camera.width;
  config.encoding.image_height = config.camera.height;
  auto def = [&](std::filesystem::path& p, const char* name) {
    if (p.empty()) p = config.paths.out_dir / name;
  };
  def(config.paths.grid, "grid.vgrid");
  def(config.paths.dataset, "dataset.vdat");
  def(config.paths.model, "model.vmdl");
  def(config.paths.report, "report.json");
  def(config.paths.csv, "report.csv");
  def(config.paths.trajectory, "trajectory.jsonl");
  def(config.paths.occupancy, "occupancy.vocc");

  config.validate();
  return config;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  auto is = open_input(path);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_run_config_json(buffer.str(), path.string());
}

}  // namespace vantage
