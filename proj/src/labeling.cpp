#include "vantage/labeling.hpp"

#include <stdexcept>

#include "vantage/parallel.hpp"
#include "vantage/seeding.hpp"

namespace vantage {

std::vector<Dataset> label_dataset_multi(const LabelingContext& ctx,
                                         const std::vector<EncodingConfig>& configs,
                                         LabelReport* report) {
  if (!ctx.grid || !ctx.cloud || !ctx.camera || !ctx.directions)
    throw std::invalid_argument("labeling context is incomplete");
  if (configs.empty()) throw std::invalid_argument("need at least one encoding config");
  for (const auto& config : configs) config.validate();
  ctx.oracle.validate();

  // Flatten (cell, kept direction) pairs in deterministic order.
  struct Item {
    int64_t cell;
    int direction;
  };
  std::vector<Item> items;
  ctx.grid->for_each_cell([&](int64_t index, const VoxelCell& cell) {
    for (const auto& o : cell.orientations) items.push_back({index, o.direction_index});
  });

  struct Slot {
    std::vector<EncodedFeature> features;  // one per config
    LabeledSample sample;                  // feature filled per config later
  };
  std::vector<Slot> slots(items.size());

  parallel_for(items.size(), ctx.workers, [&](size_t i) {
    const Item& item = items[i];
    Pose pose = ctx.grid->viewpoint_pose(item.cell, *ctx.directions, item.direction);
    VisibilityRecord record = build_record(*ctx.cloud, *ctx.camera, pose, ctx.visibility,
                                           item.cell, item.direction);
    uint64_t seed = derive_seed(ctx.global_seed, SeedPurpose::training,
                                static_cast<uint64_t>(item.cell),
                                static_cast<uint64_t>(item.direction));
    OracleOutcome outcome =
        localize_oracle(record, *ctx.cloud, *ctx.camera, pose, ctx.oracle, seed);

    Slot& slot = slots[i];
    slot.sample.cell_index = item.cell;
    slot.sample.direction_index = item.direction;
    slot.sample.label = outcome.success ? 1 : 0;
    slot.sample.ground_truth = pose;
    slot.sample.recovered = outcome.recovered;
    slot.sample.error = outcome.error;
    slot.sample.visible_count = static_cast<int>(record.visible.size());
    slot.features.reserve(configs.size());
    for (const auto& config : configs) slot.features.push_back(encode(record, config));
  });

  std::vector<Dataset> datasets(configs.size());
  for (size_t c = 0; c < configs.size(); ++c) {
    datasets[c].encoding = configs[c];
    datasets[c].samples.reserve(slots.size());
  }
  LabelReport rep;
  for (auto& slot : slots) {
    rep.viewpoints++;
    if (slot.sample.label == 1)
      rep.positives++;
    else
      rep.negatives++;
    if (!slot.sample.recovered) rep.oracle_failures++;
    for (size_t c = 0; c < configs.size(); ++c) {
      LabeledSample sample = slot.sample;
      sample.feature = std::move(slot.features[c]);
      datasets[c].samples.push_back(std::move(sample));
    }
  }
  rep.positive_fraction =
      rep.viewpoints == 0 ? 0.0 : static_cast<double>(rep.positives) / rep.viewpoints;
  if (report) *report = rep;
  return datasets;
}

Dataset label_dataset(const LabelingContext& ctx, const EncodingConfig& config,
                      LabelReport* report) {
  return std::move(label_dataset_multi(ctx, {config}, report)[0]);
}

}  // namespace vantage
