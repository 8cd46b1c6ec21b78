#include <doctest.h>

#include <algorithm>
#include <random>

#include "vantage/encoding.hpp"

using namespace vantage;

namespace {

EncodingConfig config_480(Channels c) {
  EncodingConfig cfg;
  cfg.bins_u = 30;
  cfg.bins_v = 30;
  cfg.channels = c;
  cfg.image_width = 480;
  cfg.image_height = 480;
  return cfg;
}

Observation obs(double u, double v, const Vec3& pc) {
  return {0, Vec2(u, v), pc.z(), pc};
}

}  // namespace

TEST_CASE("feature length per channel configuration") {
  CHECK(config_480(Channels::p2d).feature_length() == 30 * 30 * 2);
  CHECK(config_480(Channels::p2d_z).feature_length() == 30 * 30 * 3);
  CHECK(config_480(Channels::p2d_3d).feature_length() == 30 * 30 * 5);  // 4500
}

TEST_CASE("encode: empty record is the all-zero vector") {
  VisibilityRecord rec;
  EncodedFeature f = encode(rec, config_480(Channels::p2d_3d));
  CHECK(f.values.size() == 4500);
  CHECK(std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; }));
  CHECK(f.occupied_count() == 0);
}

TEST_CASE("encode: single landmark at (16,16) lands in bin (1,1)") {
  VisibilityRecord rec;
  rec.visible.push_back(obs(16.0, 16.0, {0.1, 0.2, 2.0}));
  EncodingConfig cfg = config_480(Channels::p2d);
  EncodedFeature f = encode(rec, cfg);
  int bin = 1 * 30 + 1;  // (bu, bv) = (1, 1)
  CHECK(f.occupied[bin] == 1);
  CHECK(f.occupied_count() == 1);
  CHECK(f.values[bin * 2 + 0] == doctest::Approx(16.0));
  CHECK(f.values[bin * 2 + 1] == doctest::Approx(16.0));
}

TEST_CASE("encode: two landmarks in one bin store the mean") {
  // 30 bins over 640 px -> 21.3 px bins, so (10,10) and (20,20) share bin 0.
  EncodingConfig cfg;
  cfg.bins_u = 30;
  cfg.bins_v = 30;
  cfg.channels = Channels::p2d_3d;
  cfg.image_width = 640;
  cfg.image_height = 640;
  VisibilityRecord rec;
  rec.visible.push_back(obs(10.0, 10.0, {0.0, 0.0, 1.0}));
  rec.visible.push_back(obs(20.0, 20.0, {1.0, 1.0, 3.0}));
  EncodedFeature f = encode(rec, cfg);
  REQUIRE(f.occupied_count() == 1);
  int b = 0;
  CHECK(f.values[b * 5 + 0] == doctest::Approx(15.0));  // mean u
  CHECK(f.values[b * 5 + 1] == doctest::Approx(15.0));  // mean v
  CHECK(f.values[b * 5 + 2] == doctest::Approx(0.5));   // mean x
  CHECK(f.values[b * 5 + 3] == doctest::Approx(0.5));   // mean y
  CHECK(f.values[b * 5 + 4] == doctest::Approx(2.0));   // mean z
}

TEST_CASE("encode: permutation invariance") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 479.999);
  VisibilityRecord rec;
  for (int i = 0; i < 60; ++i)
    rec.visible.push_back(obs(u(rng), u(rng), {u(rng) * 0.01, u(rng) * 0.01, 1.0 + i}));
  EncodingConfig cfg = config_480(Channels::p2d_3d);
  EncodedFeature base = encode(rec, cfg);

  std::shuffle(rec.visible.begin(), rec.visible.end(), rng);
  EncodedFeature shuffled = encode(rec, cfg);
  REQUIRE(base.values.size() == shuffled.values.size());
  for (size_t i = 0; i < base.values.size(); ++i)
    CHECK(base.values[i] == doctest::Approx(shuffled.values[i]).epsilon(1e-12));
}

TEST_CASE("encode: adding a landmark changes only its bin") {
  EncodingConfig cfg = config_480(Channels::p2d_3d);
  VisibilityRecord rec;
  rec.visible.push_back(obs(100.0, 100.0, {0.5, 0.5, 2.0}));
  rec.visible.push_back(obs(400.0, 400.0, {-0.5, 0.5, 4.0}));
  EncodedFeature before = encode(rec, cfg);
  rec.visible.push_back(obs(101.0, 102.0, {0.4, 0.6, 2.5}));  // same bin as first
  EncodedFeature after = encode(rec, cfg);
  int changed_bin = (100 * 30 / 480) * 30 + (100 * 30 / 480);
  for (int bin = 0; bin < cfg.bin_count(); ++bin) {
    for (int ch = 0; ch < 5; ++ch) {
      double a = before.values[bin * 5 + ch];
      double b = after.values[bin * 5 + ch];
      if (bin == changed_bin)
        continue;  // that bin's means move
      CHECK(a == b);
    }
  }
}

TEST_CASE("fit_stats: hand statistics and the zero-variance floor") {
  EncodingConfig cfg;
  cfg.bins_u = 1;
  cfg.bins_v = 1;
  cfg.channels = Channels::p2d;
  cfg.image_width = 10;
  cfg.image_height = 10;

  // Two features, single occupied bin each, channel-0 values {1, 3}.
  EncodedFeature f1, f2;
  f1.values = {1.0, 5.0};
  f1.occupied = {1};
  f2.values = {3.0, 5.0};
  f2.occupied = {1};
  StandardizationStats stats = fit_stats({f1, f2}, cfg);
  CHECK(stats.mean[0] == doctest::Approx(2.0));
  CHECK(stats.stddev[0] == doctest::Approx(1.0));  // population sigma
  CHECK(stats.mean[1] == doctest::Approx(5.0));
  CHECK(stats.stddev[1] == doctest::Approx(1e-8));  // floored

  // Identical features standardize to zero on occupied bins.
  EncodedFeature z = standardize(f2, cfg, fit_stats({f2, f2}, cfg));
  CHECK(z.values[0] == doctest::Approx(0.0));
  CHECK(z.values[1] == doctest::Approx(0.0));

  CHECK_THROWS_AS(fit_stats({}, cfg), std::invalid_argument);
}

TEST_CASE("standardize: x = mu -> 0, x = mu + sigma -> 1, empty bins untouched") {
  EncodingConfig cfg;
  cfg.bins_u = 2;
  cfg.bins_v = 1;
  cfg.channels = Channels::p2d;
  cfg.image_width = 10;
  cfg.image_height = 10;

  StandardizationStats stats;
  stats.mean = {4.0, 6.0};
  stats.stddev = {2.0, 3.0};

  EncodedFeature f;
  f.values = {4.0, 6.0, 0.0, 0.0};  // bin 0 occupied at the mean; bin 1 empty
  f.occupied = {1, 0};
  EncodedFeature z = standardize(f, cfg, stats);
  CHECK(z.values[0] == 0.0);
  CHECK(z.values[1] == 0.0);
  CHECK(z.values[2] == 0.0);  // structural zero preserved
  CHECK(z.values[3] == 0.0);

  EncodedFeature g;
  g.values = {6.0, 9.0, 0.0, 0.0};  // mu + sigma
  g.occupied = {1, 0};
  EncodedFeature zg = standardize(g, cfg, stats);
  CHECK(zg.values[0] == doctest::Approx(1.0));
  CHECK(zg.values[1] == doctest::Approx(1.0));

  // Inverse map recovers the input.
  for (int ch = 0; ch < 2; ++ch)
    CHECK(zg.values[ch] * stats.stddev[ch] + stats.mean[ch] ==
          doctest::Approx(g.values[ch]).epsilon(1e-12));

  // Channel-config mismatch rejected.
  StandardizationStats wrong;
  wrong.mean = {0.0};
  wrong.stddev = {1.0};
  CHECK_THROWS_AS(standardize(f, cfg, wrong), std::invalid_argument);
}

TEST_CASE("standardize keeps empty-bin zeros distinct from value zeros") {
  EncodingConfig cfg;
  cfg.bins_u = 2;
  cfg.bins_v = 1;
  cfg.channels = Channels::p2d;
  cfg.image_width = 100;
  cfg.image_height = 100;
  StandardizationStats stats;
  stats.mean = {50.0, 50.0};
  stats.stddev = {10.0, 10.0};

  EncodedFeature f;
  f.values = {0.0, 0.0, 0.0, 0.0};
  f.occupied = {1, 0};  // bin 0 has a genuine measured zero
  EncodedFeature z = standardize(f, cfg, stats);
  CHECK(z.values[0] == doctest::Approx(-5.0));  // measured zero moves
  CHECK(z.values[2] == 0.0);                    // structural zero stays
}
