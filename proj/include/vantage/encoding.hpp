#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vantage/visibility.hpp"

namespace vantage {

/// Which per-bin statistics feed the scorer.
/// p2d: mean pixel (u, v); p2d_z: plus mean camera-frame depth;
/// p2d_3d: pixel plus mean camera-frame (x, y, z).
enum class Channels { p2d = 0, p2d_z = 1, p2d_3d = 2 };

int channel_count(Channels c);
std::string channels_name(Channels c);
Channels channels_from_name(const std::string& name);

struct EncodingConfig {
  int bins_u = 30;
  int bins_v = 30;
  Channels channels = Channels::p2d_3d;
  int image_width = 0;
  int image_height = 0;

  int bin_count() const { return bins_u * bins_v; }
  int feature_length() const { return bin_count() * channel_count(channels); }
  void validate() const;
  bool operator==(const EncodingConfig&) const = default;
};

/// Fixed-length binned feature. values is bin-major: entry
/// [bin * c + channel] with bin = bv * bins_u + bu. Bins without landmarks
/// hold exact zeros in every channel; `occupied` distinguishes them from
/// bins whose statistics happen to be zero.
struct EncodedFeature {
  std::vector<double> values;
  std::vector<uint8_t> occupied;  // one flag per bin

  int occupied_count() const;
};

/// Per-channel standardization statistics, fitted over occupied bins only.
struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // floored at 1e-8

  bool operator==(const StandardizationStats&) const = default;
};

/// Bins a visibility record into the fixed-length feature. Pixels must lie
/// inside the configured image; an empty record yields the all-zero feature.
EncodedFeature encode(const VisibilityRecord& record, const EncodingConfig& config);

/// Population mean/stddev per channel over the occupied bins of the dataset.
/// Throws std::invalid_argument on an empty dataset or mismatched lengths.
StandardizationStats fit_stats(const std::vector<EncodedFeature>& features,
                               const EncodingConfig& config);

/// (x - mean) / stddev on occupied bins; empty bins stay exactly zero.
EncodedFeature standardize(const EncodedFeature& feature, const EncodingConfig& config,
                           const StandardizationStats& stats);

}  // namespace vantage
