#pragma once

#include <filesystem>
#include <optional>

#include "vantage/encoding.hpp"
#include "vantage/geometry.hpp"

namespace vantage {

/// One self-supervised training example.
struct LabeledSample {
  int64_t cell_index = -1;
  int direction_index = -1;
  EncodedFeature feature;    // raw (pre-standardization) encoding
  int label = 0;             // 1 iff the oracle localized within threshold
  Pose ground_truth;
  std::optional<Pose> recovered;
  PoseError error;           // meaningful only when recovered
  int visible_count = 0;
};

struct Dataset {
  EncodingConfig encoding;
  std::vector<LabeledSample> samples;

  size_t positive_count() const;
  size_t negative_count() const { return samples.size() - positive_count(); }
};

/// Length-prefixed binary records (docs/formats.md); byte-identical for
/// identical inputs.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace vantage
