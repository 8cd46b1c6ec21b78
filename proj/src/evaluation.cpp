#include "vantage/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "vantage/parallel.hpp"
#include "vantage/seeding.hpp"

namespace vantage {

void ThresholdTiers::validate() const {
  if (tiers.empty()) throw std::invalid_argument("need at least one tier");
  for (size_t i = 0; i < tiers.size(); ++i) {
    if (!(tiers[i].first > 0.0) || !(tiers[i].second > 0.0))
      throw std::invalid_argument("tier thresholds must be positive");
    if (i > 0 && !(tiers[i].first > tiers[i - 1].first &&
                   tiers[i].second > tiers[i - 1].second))
      throw std::invalid_argument("tiers must be strictly increasing in both components");
  }
}

std::string Policy::name() const {
  switch (kind) {
    case PolicyKind::random: return "random";
    case PolicyKind::reprojection_bins: return "bins";
    case PolicyKind::learned: return "learned";
    case PolicyKind::top_n_learned: return "top" + std::to_string(top_n);
  }
  throw std::logic_error("bad policy kind");
}

void Policy::validate() const {
  if ((kind == PolicyKind::learned || kind == PolicyKind::top_n_learned) && !bundle)
    throw std::invalid_argument("learned policy needs a model bundle");
  if (kind == PolicyKind::top_n_learned && top_n < 1)
    throw std::invalid_argument("top-N must be >= 1");
}

const PolicyScore& EvalReport::find(const std::string& name) const {
  for (const auto& p : policies)
    if (p.policy == name) return p;
  throw std::out_of_range("no policy '" + name + "' in report");
}

void EvalReport::merge(const EvalReport& other) {
  if (policies.empty()) {
    *this = other;
    return;
  }
  if (other.policies.size() != policies.size())
    throw std::invalid_argument("cannot merge reports with different policies");
  for (size_t i = 0; i < policies.size(); ++i) {
    if (policies[i].policy != other.policies[i].policy)
      throw std::invalid_argument("cannot merge reports with different policies");
    policies[i].cells += other.policies[i].cells;
    for (size_t t = 0; t < policies[i].successes.size(); ++t)
      policies[i].successes[t] += other.policies[i].successes[t];
  }
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["tiers"] = nlohmann::json::array();
  for (const auto& [tm, td] : tiers.tiers)
    j["tiers"].push_back({{"translation_m", tm}, {"rotation_deg", td}});
  j["policies"] = nlohmann::json::array();
  for (const auto& p : policies) {
    nlohmann::json jp{{"policy", p.policy}, {"cells", p.cells}};
    jp["successes"] = p.successes;
    auto pct = nlohmann::json::array();
    for (size_t t = 0; t < tiers.size(); ++t) pct.push_back(p.percentage(t));
    jp["percentages"] = pct;
    j["policies"].push_back(jp);
  }
  return j.dump(2);
}

std::string EvalReport::to_csv() const {
  std::ostringstream os;
  os << "tier_translation_m,tier_rotation_deg,policy,percentage\n";
  for (const auto& p : policies)
    for (size_t t = 0; t < tiers.size(); ++t)
      os << tiers.tiers[t].first << ',' << tiers.tiers[t].second << ',' << p.policy
         << ',' << p.percentage(t) << '\n';
  return os.str();
}

namespace {

struct CellPrecomputed {
  std::vector<double> scores;    // per candidate, when a bundle is present
  std::vector<int> bin_counts;   // per candidate, when bins policy is present
};

std::vector<int> select_from(const Policy& policy, const VoxelCell& cell,
                             const CellPrecomputed& pre, uint64_t seed) {
  const auto& cands = cell.orientations;
  if (cands.empty()) throw std::invalid_argument("cell has no candidate orientations");
  auto argmax = [&](const auto& values) {
    size_t best = 0;
    for (size_t i = 1; i < cands.size(); ++i) {
      bool better = values[i] > values[best] ||
                    (values[i] == values[best] &&
                     cands[i].direction_index < cands[best].direction_index);
      if (better) best = i;
    }
    return best;
  };
  switch (policy.kind) {
    case PolicyKind::random: {
      std::mt19937_64 rng(seed);
      std::uniform_int_distribution<size_t> pick(0, cands.size() - 1);
      return {cands[pick(rng)].direction_index};
    }
    case PolicyKind::reprojection_bins:
      return {cands[argmax(pre.bin_counts)].direction_index};
    case PolicyKind::learned:
      return {cands[argmax(pre.scores)].direction_index};
    case PolicyKind::top_n_learned: {
      std::vector<size_t> order(cands.size());
      std::iota(order.begin(), order.end(), size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (pre.scores[a] != pre.scores[b]) return pre.scores[a] > pre.scores[b];
        return cands[a].direction_index < cands[b].direction_index;
      });
      size_t n = std::min<size_t>(static_cast<size_t>(policy.top_n), order.size());
      std::vector<int> out;
      out.reserve(n);
      for (size_t i = 0; i < n; ++i) out.push_back(cands[order[i]].direction_index);
      return out;
    }
  }
  throw std::logic_error("bad policy kind");
}

CellPrecomputed precompute(const VoxelCell& cell,
                           const std::vector<VisibilityRecord>& records,
                           const ModelBundle* bundle, bool need_bins,
                           const EncodingConfig& bins_encoding) {
  CellPrecomputed pre;
  if (bundle) {
    pre.scores.reserve(records.size());
    for (const auto& rec : records) pre.scores.push_back(score_viewpoint(*bundle, rec));
  }
  if (need_bins) {
    pre.bin_counts.reserve(records.size());
    for (const auto& rec : records)
      pre.bin_counts.push_back(encode(rec, bins_encoding).occupied_count());
  }
  (void)cell;
  return pre;
}

}  // namespace

std::vector<int> select_viewpoint(const Policy& policy, const VoxelCell& cell,
                                  const std::vector<VisibilityRecord>& records,
                                  const EncodingConfig& bins_encoding, uint64_t seed) {
  policy.validate();
  if (records.size() != cell.orientations.size())
    throw std::invalid_argument("one record per candidate orientation required");
  CellPrecomputed pre =
      precompute(cell, records, policy.bundle,
                 policy.kind == PolicyKind::reprojection_bins, bins_encoding);
  return select_from(policy, cell, pre, seed);
}

EvalReport evaluate(const EvalContext& ctx, const std::vector<Policy>& policies,
                    const ThresholdTiers& tiers) {
  if (!ctx.grid || !ctx.cloud || !ctx.camera || !ctx.directions)
    throw std::invalid_argument("evaluation context is incomplete");
  tiers.validate();
  for (const auto& p : policies) p.validate();

  const ModelBundle* bundle = nullptr;
  bool need_bins = false;
  for (const auto& p : policies) {
    if (p.bundle) {
      if (bundle && bundle != p.bundle)
        throw std::invalid_argument("all learned policies must share one bundle");
      bundle = p.bundle;
    }
    need_bins |= p.kind == PolicyKind::reprojection_bins;
  }

  const size_t n_cells = ctx.grid->cell_count();
  const size_t n_tiers = tiers.size();
  // Validate before fanning out; exceptions must not escape worker threads.
  ctx.grid->for_each_cell([](int64_t, const VoxelCell& cell) {
    if (cell.orientations.empty())
      throw std::invalid_argument("grid is not ranked: cell without candidates");
  });
  // successes[policy][tier] per cell slot, merged in order afterwards.
  std::vector<std::vector<std::vector<char>>> cell_success(
      n_cells, std::vector<std::vector<char>>(policies.size(),
                                              std::vector<char>(n_tiers, 0)));

  parallel_for(n_cells, ctx.workers, [&](size_t ci) {
    const VoxelCell& cell = ctx.grid->cell(static_cast<int64_t>(ci));
    std::vector<VisibilityRecord> records;
    records.reserve(cell.orientations.size());
    for (const auto& o : cell.orientations) {
      Pose pose = ctx.grid->viewpoint_pose(static_cast<int64_t>(ci), *ctx.directions,
                                           o.direction_index);
      records.push_back(build_record(*ctx.cloud, *ctx.camera, pose, ctx.visibility,
                                     static_cast<int64_t>(ci), o.direction_index));
    }
    CellPrecomputed pre =
        precompute(cell, records, bundle, need_bins, ctx.bins_encoding);

    // One oracle run per distinct picked direction, shared across policies.
    std::unordered_map<int, PoseError> outcome_err;
    std::unordered_map<int, bool> outcome_recovered;
    auto localize = [&](int dir) {
      if (outcome_err.count(dir)) return;
      size_t slot = 0;
      for (; slot < cell.orientations.size(); ++slot)
        if (cell.orientations[slot].direction_index == dir) break;
      Pose pose =
          ctx.grid->viewpoint_pose(static_cast<int64_t>(ci), *ctx.directions, dir);
      uint64_t seed = derive_seed(ctx.eval_seed, SeedPurpose::evaluation,
                                  static_cast<uint64_t>(ci), static_cast<uint64_t>(dir));
      OracleOutcome out =
          localize_oracle(records[slot], *ctx.cloud, *ctx.camera, pose, ctx.oracle, seed);
      outcome_recovered[dir] = out.recovered.has_value();
      outcome_err[dir] = out.error;
    };

    for (size_t pi = 0; pi < policies.size(); ++pi) {
      uint64_t pick_seed = derive_seed(ctx.eval_seed, SeedPurpose::evaluation,
                                       static_cast<uint64_t>(ci), 0xabcd0000ull + pi);
      std::vector<int> picks = select_from(policies[pi], cell, pre, pick_seed);
      for (int dir : picks) localize(dir);
      for (size_t t = 0; t < n_tiers; ++t) {
        bool ok = false;
        for (int dir : picks) {
          if (!outcome_recovered[dir]) continue;
          const PoseError& e = outcome_err[dir];
          if (e.translation_m <= tiers.tiers[t].first &&
              e.rotation_deg <= tiers.tiers[t].second) {
            ok = true;
            break;
          }
        }
        cell_success[ci][pi][t] = ok ? 1 : 0;
      }
    }
  });

  EvalReport report;
  report.tiers = tiers;
  report.policies.resize(policies.size());
  for (size_t pi = 0; pi < policies.size(); ++pi) {
    report.policies[pi].policy = policies[pi].name();
    report.policies[pi].successes.assign(n_tiers, 0);
    report.policies[pi].cells = n_cells;
    for (size_t ci = 0; ci < n_cells; ++ci)
      for (size_t t = 0; t < n_tiers; ++t)
        report.policies[pi].successes[t] += cell_success[ci][pi][t];
  }
  return report;
}

void score_grid(VoxelGrid& grid, const ModelBundle& bundle, const LandmarkCloud& cloud,
                const PinholeCamera& camera, const DirectionSet& directions,
                const VisibilityParams& visibility, int workers) {
  bundle.validate();
  const size_t n_cells = grid.cell_count();
  std::vector<std::vector<double>> scores(n_cells);
  parallel_for(n_cells, workers, [&](size_t ci) {
    const VoxelCell& cell = grid.cell(static_cast<int64_t>(ci));
    scores[ci].reserve(cell.orientations.size());
    for (const auto& o : cell.orientations) {
      Pose pose = grid.viewpoint_pose(static_cast<int64_t>(ci), directions,
                                      o.direction_index);
      VisibilityRecord rec = build_record(cloud, camera, pose, visibility,
                                          static_cast<int64_t>(ci), o.direction_index);
      scores[ci].push_back(score_viewpoint(bundle, rec));
    }
  });
  grid.for_each_cell([&](int64_t index, VoxelCell& cell) {
    auto& s = scores[static_cast<size_t>(index)];
    for (size_t i = 0; i < cell.orientations.size(); ++i)
      cell.orientations[i].score = s[i];
  });
}

ModelBundle train_bundle(const Dataset& dataset, const TrainConfig& config) {
  if (dataset.samples.empty()) throw std::invalid_argument("empty dataset");
  StandardizationStats stats;
  {
    std::vector<EncodedFeature> features;
    features.reserve(dataset.samples.size());
    for (const auto& s : dataset.samples) features.push_back(s.feature);
    stats = fit_stats(features, dataset.encoding);
  }
  std::vector<TrainSample> samples;
  samples.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) {
    EncodedFeature std_f = standardize(s.feature, dataset.encoding, stats);
    TrainSample ts;
    ts.input = Eigen::Map<const Eigen::VectorXd>(std_f.values.data(),
                                                 static_cast<Eigen::Index>(std_f.values.size()));
    ts.label = s.label;
    samples.push_back(std::move(ts));
  }
  TrainResult result = train_mlp(samples, config);

  ModelBundle bundle;
  bundle.params = std::move(result.params);
  bundle.encoding = dataset.encoding;
  bundle.stats = std::move(stats);
  bundle.seed = config.seed;
  bundle.epochs = config.epochs;
  bundle.final_loss = result.epoch_losses.empty() ? 0.0 : result.epoch_losses.back();
  bundle.positive_weight = result.positive_weight;
  bundle.negative_weight = result.negative_weight;
  bundle.validate();
  return bundle;
}

std::vector<AblationEntry> ablation_run(const std::vector<Dataset>& train_sets,
                                        const EvalContext& eval_ctx,
                                        const ThresholdTiers& tiers,
                                        const TrainConfig& train_config) {
  std::vector<AblationEntry> entries;
  entries.reserve(train_sets.size());
  for (const auto& dataset : train_sets) {
    AblationEntry entry;
    entry.channels = dataset.encoding.channels;
    entry.bundle = train_bundle(dataset, train_config);
    EvalContext ctx = eval_ctx;
    Policy learned{PolicyKind::learned, &entry.bundle, 1};
    entry.report = evaluate(ctx, {learned}, tiers);
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace vantage
