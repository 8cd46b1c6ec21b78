#include "vantage/encoding.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vantage {

int channel_count(Channels c) {
  switch (c) {
    case Channels::p2d: return 2;
    case Channels::p2d_z: return 3;
    case Channels::p2d_3d: return 5;
  }
  throw std::logic_error("bad channels enum");
}

std::string channels_name(Channels c) {
  switch (c) {
    case Channels::p2d: return "p2d";
    case Channels::p2d_z: return "p2d_z";
    case Channels::p2d_3d: return "p2d_3d";
  }
  throw std::logic_error("bad channels enum");
}

Channels channels_from_name(const std::string& name) {
  if (name == "p2d") return Channels::p2d;
  if (name == "p2d_z") return Channels::p2d_z;
  if (name == "p2d_3d") return Channels::p2d_3d;
  throw std::invalid_argument("unknown channel config '" + name +
                              "' (expect p2d, p2d_z, p2d_3d)");
}

void EncodingConfig::validate() const {
  if (bins_u < 1 || bins_v < 1) throw std::invalid_argument("bins must be >= 1");
  if (image_width < 1 || image_height < 1)
    throw std::invalid_argument("encoding image size must be positive");
}

int EncodedFeature::occupied_count() const {
  return static_cast<int>(std::accumulate(occupied.begin(), occupied.end(), 0));
}

EncodedFeature encode(const VisibilityRecord& record, const EncodingConfig& config) {
  config.validate();
  const int c = channel_count(config.channels);
  const int bins = config.bin_count();
  EncodedFeature feature;
  feature.values.assign(static_cast<size_t>(bins) * c, 0.0);
  feature.occupied.assign(bins, 0);
  std::vector<int> counts(bins, 0);

  for (const auto& obs : record.visible) {
    if (obs.pixel.x() < 0 || obs.pixel.x() >= config.image_width ||
        obs.pixel.y() < 0 || obs.pixel.y() >= config.image_height)
      throw std::invalid_argument("record pixel outside the configured image");
    int bu = static_cast<int>(obs.pixel.x() * config.bins_u / config.image_width);
    int bv = static_cast<int>(obs.pixel.y() * config.bins_v / config.image_height);
    bu = std::min(bu, config.bins_u - 1);
    bv = std::min(bv, config.bins_v - 1);
    int bin = bv * config.bins_u + bu;
    double* slot = feature.values.data() + static_cast<size_t>(bin) * c;
    slot[0] += obs.pixel.x();
    slot[1] += obs.pixel.y();
    if (config.channels == Channels::p2d_z) {
      slot[2] += obs.point_cam.z();
    } else if (config.channels == Channels::p2d_3d) {
      slot[2] += obs.point_cam.x();
      slot[3] += obs.point_cam.y();
      slot[4] += obs.point_cam.z();
    }
    counts[bin]++;
  }
  for (int bin = 0; bin < bins; ++bin) {
    if (counts[bin] == 0) continue;
    feature.occupied[bin] = 1;
    double inv = 1.0 / counts[bin];
    double* slot = feature.values.data() + static_cast<size_t>(bin) * c;
    for (int ch = 0; ch < c; ++ch) slot[ch] *= inv;
  }
  return feature;
}

StandardizationStats fit_stats(const std::vector<EncodedFeature>& features,
                               const EncodingConfig& config) {
  if (features.empty()) throw std::invalid_argument("cannot fit stats on an empty dataset");
  const int c = channel_count(config.channels);
  const int bins = config.bin_count();
  std::vector<double> sum(c, 0.0), sum_sq(c, 0.0);
  std::vector<int64_t> count(c, 0);
  for (const auto& f : features) {
    if (static_cast<int>(f.values.size()) != config.feature_length())
      throw std::invalid_argument("feature length does not match the encoding config");
    for (int bin = 0; bin < bins; ++bin) {
      if (!f.occupied[bin]) continue;
      const double* slot = f.values.data() + static_cast<size_t>(bin) * c;
      for (int ch = 0; ch < c; ++ch) {
        sum[ch] += slot[ch];
        sum_sq[ch] += slot[ch] * slot[ch];
        count[ch]++;
      }
    }
  }
  StandardizationStats stats;
  stats.mean.resize(c);
  stats.stddev.resize(c);
  for (int ch = 0; ch < c; ++ch) {
    if (count[ch] == 0) {
      stats.mean[ch] = 0.0;
      stats.stddev[ch] = 1.0;
      continue;
    }
    double mu = sum[ch] / static_cast<double>(count[ch]);
    double var = sum_sq[ch] / static_cast<double>(count[ch]) - mu * mu;
    stats.mean[ch] = mu;
    stats.stddev[ch] = std::max(std::sqrt(std::max(var, 0.0)), 1e-8);
  }
  return stats;
}

EncodedFeature standardize(const EncodedFeature& feature, const EncodingConfig& config,
                           const StandardizationStats& stats) {
  const int c = channel_count(config.channels);
  if (static_cast<int>(stats.mean.size()) != c)
    throw std::invalid_argument("stats channel count does not match the encoding config");
  if (static_cast<int>(feature.values.size()) != config.feature_length())
    throw std::invalid_argument("feature length does not match the encoding config");
  EncodedFeature out = feature;
  const int bins = config.bin_count();
  for (int bin = 0; bin < bins; ++bin) {
    if (!out.occupied[bin]) continue;  // structural zeros stay exact zeros
    double* slot = out.values.data() + static_cast<size_t>(bin) * c;
    for (int ch = 0; ch < c; ++ch)
      slot[ch] = (slot[ch] - stats.mean[ch]) / stats.stddev[ch];
  }
  return out;
}

}  // namespace vantage
