#pragma once

#include <filesystem>

#include "vantage/encoding.hpp"
#include "vantage/mlp.hpp"
#include "vantage/visibility.hpp"

namespace vantage {

/// Everything needed to score a viewpoint: network weights, the encoding
/// layout they were trained on, and the standardization statistics baked in
/// at training time.
struct ModelBundle {
  MlpParameters params;
  EncodingConfig encoding;
  StandardizationStats stats;

  uint64_t seed = 0;
  int epochs = 0;
  double final_loss = 0.0;
  double positive_weight = 1.0;
  double negative_weight = 1.0;

  // Throws std::invalid_argument when layer-1 input size disagrees with the
  // encoding config.
  void validate() const;
};

/// encode -> standardize -> eval forward. Pure in the record.
double score_viewpoint(const ModelBundle& bundle, const VisibilityRecord& record);

/// Batch scoring of pre-encoded raw features.
Eigen::VectorXd score_features(const ModelBundle& bundle,
                               const std::vector<EncodedFeature>& features);

/// Versioned binary container (docs/formats.md). Bit-exact round trip.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace vantage
