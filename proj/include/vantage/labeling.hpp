#pragma once

#include "vantage/dataset.hpp"
#include "vantage/pnp.hpp"
#include "vantage/voxel_grid.hpp"

namespace vantage {

struct LabelReport {
  size_t viewpoints = 0;
  size_t positives = 0;
  size_t negatives = 0;
  size_t oracle_failures = 0;  // no pose recovered
  double positive_fraction = 0.0;
};

struct LabelingContext {
  const VoxelGrid* grid = nullptr;
  const LandmarkCloud* cloud = nullptr;
  const PinholeCamera* camera = nullptr;
  const DirectionSet* directions = nullptr;
  VisibilityParams visibility;
  OracleConfig oracle;
  uint64_t global_seed = 1;
  int workers = 1;
};

/// Labels every (cell, kept direction) of the ranked grid with the
/// localization oracle and encodes features for each requested channel
/// config (one oracle run per viewpoint; labels are channel-independent).
/// Per-viewpoint seeds derive from (global seed, cell, direction) in the
/// training partition, so worker count and iteration order cannot change
/// the result.
std::vector<Dataset> label_dataset_multi(const LabelingContext& ctx,
                                         const std::vector<EncodingConfig>& configs,
                                         LabelReport* report = nullptr);

Dataset label_dataset(const LabelingContext& ctx, const EncodingConfig& config,
                      LabelReport* report = nullptr);

}  // namespace vantage
