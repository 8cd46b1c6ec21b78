#pragma once

#include <filesystem>
#include <string>

#include "vantage/labeling.hpp"
#include "vantage/model_bundle.hpp"

namespace vantage {

/// Localization accuracy tiers, ordered finest to coarsest and strictly
/// increasing in both components.
struct ThresholdTiers {
  std::vector<std::pair<double, double>> tiers;  // (translation m, rotation deg)

  static ThresholdTiers standard() {
    return {{{0.05, 0.4}, {0.25, 2.0}, {0.5, 5.0}, {5.0, 10.0}}};
  }
  size_t size() const { return tiers.size(); }
  void validate() const;
};

enum class PolicyKind { random, reprojection_bins, learned, top_n_learned };

struct Policy {
  PolicyKind kind = PolicyKind::random;
  const ModelBundle* bundle = nullptr;  // required for the learned kinds
  int top_n = 1;                        // top_n_learned only

  std::string name() const;
  void validate() const;
};

/// Per-policy success counts, one entry per tier.
struct PolicyScore {
  std::string policy;
  std::vector<size_t> successes;
  size_t cells = 0;

  double percentage(size_t tier) const {
    return cells == 0 ? 0.0 : 100.0 * static_cast<double>(successes[tier]) / cells;
  }
};

struct EvalReport {
  ThresholdTiers tiers;
  std::vector<PolicyScore> policies;

  const PolicyScore& find(const std::string& name) const;
  /// Pools successes/cells with another report over the same tiers and
  /// policies (multi-scene aggregation).
  void merge(const EvalReport& other);

  std::string to_json() const;
  std::string to_csv() const;  // header: tier_m,tier_deg,policy,percentage
};

/// Picks the policy's direction(s) from a cell's ranked candidates.
/// `records` runs parallel to cell.orientations. Returns direction indices;
/// size 1 except for top_n_learned. Throws std::invalid_argument for an
/// empty cell.
std::vector<int> select_viewpoint(const Policy& policy, const VoxelCell& cell,
                                  const std::vector<VisibilityRecord>& records,
                                  const EncodingConfig& bins_encoding, uint64_t seed);

struct EvalContext {
  const VoxelGrid* grid = nullptr;
  const LandmarkCloud* cloud = nullptr;
  const PinholeCamera* camera = nullptr;
  const DirectionSet* directions = nullptr;
  VisibilityParams visibility;
  OracleConfig oracle;
  EncodingConfig bins_encoding;  // for the reprojection-with-bins baseline
  uint64_t eval_seed = 1;
  int workers = 1;
};

/// Runs every policy over each cell of the ranked grid: the policy picks
/// viewpoints, each pick is localized with an evaluation-partition seed, and
/// per-tier successes are aggregated. A top-N policy counts a cell as
/// success when any of its N picks succeeds.
EvalReport evaluate(const EvalContext& ctx, const std::vector<Policy>& policies,
                    const ThresholdTiers& tiers);

/// Writes every kept orientation's learned score into the grid.
void score_grid(VoxelGrid& grid, const ModelBundle& bundle, const LandmarkCloud& cloud,
                const PinholeCamera& camera, const DirectionSet& directions,
                const VisibilityParams& visibility, int workers = 1);

struct AblationEntry {
  Channels channels = Channels::p2d;
  ModelBundle bundle;
  EvalReport report;
};

/// Trains one bundle per channel config on its dataset and evaluates each
/// learned policy under identical conditions.
std::vector<AblationEntry> ablation_run(const std::vector<Dataset>& train_sets,
                                        const EvalContext& eval_ctx,
                                        const ThresholdTiers& tiers,
                                        const TrainConfig& train_config);

/// Trains a scoring bundle from a labeled dataset (fits standardization on
/// the dataset, trains the classifier on standardized features).
ModelBundle train_bundle(const Dataset& dataset, const TrainConfig& config);

}  // namespace vantage
