#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>

#include "vantage/cloud_io.hpp"
#include "vantage/evaluation.hpp"
#include "vantage/run_config.hpp"
#include "vantage/serial.hpp"

namespace {

using namespace vantage;

struct SceneData {
  LandmarkCloud cloud;
  std::vector<Vec3> dense_samples;
};

SceneData load_scene(const RunConfig& config) {
  if (!config.scene.cloud_path.empty())
    return {load_cloud(config.scene.cloud_path), {}};
  GeneratedScene scene = generate_scene(config.scene.spec);
  return {std::move(scene.cloud), std::move(scene.dense_samples)};
}

OccupancyMap make_occupancy(const RunConfig& config, const SceneData& scene) {
  if (!scene.dense_samples.empty())
    return build_occupancy(scene.dense_samples, config.grid.occupancy_cell);
  return build_occupancy(scene.cloud, config.grid.occupancy_cell);
}

VisibilityParams visibility_params(const RunConfig& config, const OccupancyMap* occ) {
  VisibilityParams params;
  params.mode = config.grid.occlusion;
  params.hpr_gamma = config.grid.hpr_gamma;
  params.occupancy = occ;
  return params;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  atomic_write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

int cmd_sample(const RunConfig& config) {
  SceneData scene = load_scene(config);
  DirectionSet directions = fibonacci_directions(config.grid.directions);
  VoxelGrid grid = VoxelGrid::build(scene.cloud, config.grid.resolution,
                                    config.grid.margin);

  OccupancyMap occupancy;
  bool have_occ = false;
  if (config.grid.occlusion == OcclusionMode::occupancy) {
    occupancy = make_occupancy(config, scene);
    have_occ = true;
  }
  VisibilityParams params = visibility_params(config, have_occ ? &occupancy : nullptr);
  rank_orientations(grid, scene.cloud, config.camera, directions, params,
                    config.grid.keep_k, config.effective_workers());

  save_grid(grid, config.paths.grid);
  if (have_occ) save_occupancy(occupancy, config.paths.occupancy);

  // Stats summary: visibility histogram over each cell's best direction.
  std::map<std::string, size_t> histogram;
  size_t candidates = 0;
  grid.for_each_cell([&](int64_t, const VoxelCell& cell) {
    candidates += cell.orientations.size();
    int best = cell.orientations.empty() ? 0 : cell.orientations.front().visible_count;
    int bucket = 1;
    while (bucket <= best) bucket *= 4;
    histogram["<" + std::to_string(bucket)]++;
  });
  nlohmann::json stats{{"cells", grid.cell_count()},
                       {"directions", directions.size()},
                       {"candidates", candidates},
                       {"landmarks", scene.cloud.size()},
                       {"best_visibility_histogram", histogram}};
  write_json(config.paths.out_dir / "sample_stats.json", stats);
  std::cout << "grid: " << config.paths.grid.string() << " (" << grid.cell_count()
            << " cells, " << candidates << " candidates)\n";
  return 0;
}

int cmd_label(const RunConfig& config) {
  SceneData scene = load_scene(config);
  VoxelGrid grid = load_grid(config.paths.grid);
  DirectionSet directions = fibonacci_directions(grid.direction_count());

  OccupancyMap occupancy;
  bool have_occ = false;
  if (config.grid.occlusion == OcclusionMode::occupancy) {
    occupancy = make_occupancy(config, scene);
    have_occ = true;
  }

  LabelingContext ctx;
  ctx.grid = &grid;
  ctx.cloud = &scene.cloud;
  ctx.camera = &config.camera;
  ctx.directions = &directions;
  ctx.visibility = visibility_params(config, have_occ ? &occupancy : nullptr);
  ctx.oracle = config.oracle;
  ctx.global_seed = config.seed;
  ctx.workers = config.effective_workers();

  LabelReport report;
  Dataset dataset = label_dataset(ctx, config.encoding, &report);
  save_dataset(dataset, config.paths.dataset);

  nlohmann::json j{{"viewpoints", report.viewpoints},
                   {"positives", report.positives},
                   {"negatives", report.negatives},
                   {"oracle_failures", report.oracle_failures},
                   {"positive_fraction", report.positive_fraction},
                   {"channels", channels_name(config.encoding.channels)}};
  write_json(config.paths.out_dir / "label_report.json", j);
  std::cout << "dataset: " << config.paths.dataset.string() << " ("
            << report.viewpoints << " samples, " << 100.0 * report.positive_fraction
            << "% positive)\n";
  return 0;
}

int cmd_train(const RunConfig& config) {
  Dataset dataset = load_dataset(config.paths.dataset);
  ModelBundle bundle = train_bundle(dataset, config.training);
  save_bundle(bundle, config.paths.model);
  std::cout << "model: " << config.paths.model.string()
            << " (final loss " << bundle.final_loss << ")\n";
  return 0;
}

int cmd_eval(const RunConfig& config) {
  SceneData scene = load_scene(config);
  VoxelGrid grid = load_grid(config.paths.grid);
  DirectionSet directions = fibonacci_directions(grid.direction_count());
  ModelBundle bundle = load_bundle(config.paths.model);

  OccupancyMap occupancy;
  bool have_occ = false;
  if (config.grid.occlusion == OcclusionMode::occupancy) {
    occupancy = make_occupancy(config, scene);
    have_occ = true;
  }

  EvalContext ctx;
  ctx.grid = &grid;
  ctx.cloud = &scene.cloud;
  ctx.camera = &config.camera;
  ctx.directions = &directions;
  ctx.visibility = visibility_params(config, have_occ ? &occupancy : nullptr);
  ctx.oracle = config.oracle;
  ctx.bins_encoding = config.encoding;
  ctx.eval_seed = config.seed;
  ctx.workers = config.effective_workers();

  std::vector<Policy> policies{{PolicyKind::random, nullptr, 1},
                               {PolicyKind::reprojection_bins, nullptr, 1},
                               {PolicyKind::learned, &bundle, 1}};
  for (int n : config.top_n) policies.push_back({PolicyKind::top_n_learned, &bundle, n});

  EvalReport report = evaluate(ctx, policies, config.tiers);
  atomic_write_file(config.paths.report,
                    [&](std::ostream& os) { os << report.to_json() << '\n'; });
  atomic_write_file(config.paths.csv,
                    [&](std::ostream& os) { os << report.to_csv(); });
  std::cout << report.to_csv();
  return 0;
}

int cmd_plan(const RunConfig& config) {
  SceneData scene = load_scene(config);
  VoxelGrid grid = load_grid(config.paths.grid);
  DirectionSet directions = fibonacci_directions(grid.direction_count());
  ModelBundle bundle = load_bundle(config.paths.model);
  OccupancyMap occupancy = make_occupancy(config, scene);

  OccupancyMap ranking_occ;  // for record building when occupancy mode is on
  bool have_occ = config.grid.occlusion == OcclusionMode::occupancy;
  if (have_occ) ranking_occ = occupancy;
  score_grid(grid, bundle, scene.cloud, config.camera, directions,
             visibility_params(config, have_occ ? &ranking_occ : nullptr),
             config.effective_workers());

  PlanProblem problem;
  problem.start = config.endpoints.start;
  problem.goal = config.endpoints.goal;
  problem.occupancy = &occupancy;
  problem.grid = &grid;
  problem.params = config.planner;

  auto path = plan(problem);
  if (!path) {
    std::cerr << "error: no path found within " << config.planner.max_iterations
              << " iterations\n";
    return 2;
  }
  Trajectory traj = attach_viewpoints(path->positions, grid, directions);
  export_trajectory(traj, config.paths.trajectory);
  std::cout << "trajectory: " << config.paths.trajectory.string() << " ("
            << traj.waypoints.size() << " waypoints, length " << traj.length << ")\n";
  return 0;
}

int cmd_info(const std::filesystem::path& path) {
  auto is = open_input(path);
  BinaryReader r(is, path.string());
  uint64_t magic = 0;
  try {
    magic = r.get_u64();
  } catch (const io_error&) {
    std::cout << path.string() << ": unrecognized (too short)\n";
    return 1;
  }
  nlohmann::json j{{"file", path.string()}};
  switch (magic) {
    case 0x5647524944303176ull: {
      VoxelGrid grid = load_grid(path);
      j["type"] = "viewpoint-grid";
      j["cells"] = grid.cell_count();
      j["directions"] = grid.direction_count();
      j["resolution"] = {grid.resolution().x(), grid.resolution().y(),
                         grid.resolution().z()};
      break;
    }
    case 0x5644415430317644ull: {
      Dataset ds = load_dataset(path);
      j["type"] = "dataset";
      j["samples"] = ds.samples.size();
      j["positives"] = ds.positive_count();
      j["channels"] = channels_name(ds.encoding.channels);
      j["feature_length"] = ds.encoding.feature_length();
      break;
    }
    case 0x564d444c30317642ull: {
      ModelBundle b = load_bundle(path);
      j["type"] = "model-bundle";
      j["input_size"] = b.params.input_size();
      j["hidden_size"] = b.params.hidden_size();
      j["channels"] = channels_name(b.encoding.channels);
      j["epochs"] = b.epochs;
      j["seed"] = b.seed;
      j["final_loss"] = b.final_loss;
      break;
    }
    case 0x564f43433031764full: {
      OccupancyMap m = load_occupancy(path);
      j["type"] = "occupancy";
      j["cell_edge"] = m.cell_edge();
      j["occupied"] = m.occupied_count();
      break;
    }
    default:
      j["type"] = "unknown";
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viewpoint-map toolkit: sample, label, train, evaluate, plan"};
  app.require_subcommand(1);

  std::string config_path;
  uint64_t seed_override = 0;
  bool seed_set = false;
  int workers_override = 0;
  int epochs_override = 0;
  int iterations_override = 0;
  std::string out_dir_override;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--seed", seed_override, "override the global seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--workers", workers_override, "override the worker count");
    sub->add_option("--out-dir", out_dir_override, "override paths.out_dir");
  };

  CLI::App* sample = app.add_subcommand("sample", "build and rank the viewpoint grid");
  add_common(sample);
  CLI::App* label = app.add_subcommand("label", "label viewpoints with the oracle");
  add_common(label);
  CLI::App* train = app.add_subcommand("train", "train the scoring model");
  add_common(train);
  train->add_option("--epochs", epochs_override, "override training.epochs");
  CLI::App* eval = app.add_subcommand("eval", "evaluate selection policies");
  add_common(eval);
  CLI::App* planc = app.add_subcommand("plan", "plan a trajectory over the scored map");
  add_common(planc);
  planc->add_option("--iterations", iterations_override, "override planner.max_iterations");

  std::string info_path;
  CLI::App* info = app.add_subcommand("info", "print artifact file metadata");
  info->add_option("file", info_path, "artifact file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (info->parsed()) return cmd_info(info_path);

    RunConfig config = parse_run_config(config_path);
    if (seed_set) {
      config.seed = seed_override;
      config.training.seed = seed_override;
      config.planner.seed = seed_override;
    }
    if (workers_override > 0) config.workers = workers_override;
    if (!out_dir_override.empty()) {
      // Re-derive default file locations under the new directory.
      RunConfig fresh = config;
      fresh.paths = PathsConfig{};
      fresh.paths.out_dir = out_dir_override;
      fresh.paths.grid = fresh.paths.out_dir / "grid.vgrid";
      fresh.paths.dataset = fresh.paths.out_dir / "dataset.vdat";
      fresh.paths.model = fresh.paths.out_dir / "model.vmdl";
      fresh.paths.report = fresh.paths.out_dir / "report.json";
      fresh.paths.csv = fresh.paths.out_dir / "report.csv";
      fresh.paths.trajectory = fresh.paths.out_dir / "trajectory.jsonl";
      fresh.paths.occupancy = fresh.paths.out_dir / "occupancy.vocc";
      config = fresh;
    }
    if (epochs_override > 0) config.training.epochs = epochs_override;
    if (iterations_override > 0) config.planner.max_iterations = iterations_override;

    if (sample->parsed()) return cmd_sample(config);
    if (label->parsed()) return cmd_label(config);
    if (train->parsed()) return cmd_train(config);
    if (eval->parsed()) return cmd_eval(config);
    if (planc->parsed()) return cmd_plan(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
