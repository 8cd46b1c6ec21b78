#include <doctest.h>

#include <filesystem>
#include <random>

#include "vantage/model_bundle.hpp"

using namespace vantage;

namespace {

Batch random_batch(int input, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  Batch b;
  b.inputs.resize(input, n);
  b.labels.resize(n);
  b.sample_weight.resize(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < input; ++i) b.inputs(i, j) = g(rng);
    b.labels[j] = coin(rng);
    b.sample_weight[j] = 0.5 + std::abs(g(rng));
  }
  return b;
}

MlpParameters random_params(int input, int hidden, uint64_t seed) {
  // Randomize the biases too: zero biases put pre-activations exactly on the
  // ReLU kink whenever a whole layer-1 column dies, and central differences
  // straddle the subgradient there.
  MlpParameters p = MlpParameters::he_init(input, hidden, seed);
  std::mt19937_64 rng(seed ^ 0x5bf03635ull);
  std::normal_distribution<double> g(0.0, 0.2);
  for (Eigen::Index i = 0; i < p.b1.size(); ++i) p.b1[i] = g(rng);
  for (Eigen::Index i = 0; i < p.b2.size(); ++i) p.b2[i] = g(rng);
  p.b3[0] = g(rng);
  return p;
}

// Central finite differences over every entry of every parameter tensor.
double max_relative_gradient_error(MlpParameters params, const Batch& batch,
                                   double lambda) {
  DropoutMasks masks = DropoutMasks::none(params.hidden_size(),
                                          static_cast<int>(batch.inputs.cols()));
  MlpGradients analytic = backward(params, batch, lambda, masks);
  const double h = 1e-6;
  double worst = 0.0;
  auto probe = [&](double* theta, const double* grad, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) {
      double saved = theta[i];
      theta[i] = saved + h;
      double up = loss(params, batch, lambda, masks);
      theta[i] = saved - h;
      double down = loss(params, batch, lambda, masks);
      theta[i] = saved;
      double fd = (up - down) / (2.0 * h);
      double rel = std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
      worst = std::max(worst, rel);
    }
  };
  probe(params.w1.data(), analytic.w1.data(), params.w1.size());
  probe(params.w2.data(), analytic.w2.data(), params.w2.size());
  probe(params.w3.data(), analytic.w3.data(), params.w3.size());
  probe(params.b1.data(), analytic.b1.data(), params.b1.size());
  probe(params.b2.data(), analytic.b2.data(), params.b2.size());
  probe(params.b3.data(), analytic.b3.data(), params.b3.size());
  return worst;
}

}  // namespace

TEST_CASE("forward: all-zero parameters output 0.5") {
  MlpParameters p = MlpParameters::zeros(10, 8);
  Eigen::VectorXd x = Eigen::VectorXd::Random(10);
  CHECK(forward_eval(p, x) == doctest::Approx(0.5));
}

TEST_CASE("forward: eval mode ignores dropout seeds and stays in (0,1)") {
  MlpParameters p = random_params(12, 16, 5);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd x(12);
    for (int k = 0; k < 12; ++k) x[k] = g(rng);
    double out = forward_eval(p, x);
    CHECK(out > 0.0);
    CHECK(out < 1.0);
    CHECK(forward_eval(p, x) == out);  // pure
  }
}

TEST_CASE("forward: hand-computed minimal network") {
  // 2 -> 1 -> 1 -> 1 network with fixed weights, dropout off.
  MlpParameters p = MlpParameters::zeros(2, 1);
  p.w1(0, 0) = 0.5;
  p.w1(0, 1) = -0.25;
  p.b1[0] = 0.1;
  p.w2(0, 0) = 2.0;
  p.b2[0] = -0.05;
  p.w3(0, 0) = 1.5;
  p.b3[0] = 0.2;
  Eigen::Vector2d x(1.0, 1.0);
  // h1 = relu(0.5 - 0.25 + 0.1) = 0.35; h2 = relu(0.7 - 0.05) = 0.65;
  // z3 = 1.5*0.65 + 0.2 = 1.175; p = sigmoid(1.175).
  double expected = 1.0 / (1.0 + std::exp(-1.175));
  CHECK(forward_eval(p, x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("loss: perfect predictions, ln 2 at p = 0.5, additive regularizer") {
  // Zero weights give p = 0.5 for every input: loss is ln 2 with unit weights.
  MlpParameters zero = MlpParameters::zeros(4, 3);
  std::mt19937_64 rng(11);
  Batch b = random_batch(4, 16, rng);
  b.sample_weight.setOnes();
  DropoutMasks none = DropoutMasks::none(3, 16);
  CHECK(loss(zero, b, 0.0, none) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // A strongly separable direction drives the loss toward zero.
  MlpParameters p = MlpParameters::zeros(1, 2);
  p.w1(0, 0) = 1.0;
  p.w1(1, 0) = -1.0;
  p.w2(0, 0) = 50.0;
  p.w2(0, 1) = -50.0;
  p.w2(1, 0) = -50.0;
  p.w2(1, 1) = 50.0;
  p.w3(0, 0) = 50.0;
  p.w3(0, 1) = -50.0;
  Batch sep;
  sep.inputs.resize(1, 2);
  sep.inputs << 1.0, -1.0;
  sep.labels.resize(2);
  sep.labels << 1.0, 0.0;
  sep.sample_weight = Eigen::VectorXd::Ones(2);
  DropoutMasks none2 = DropoutMasks::none(2, 2);
  CHECK(loss(p, sep, 0.0, none2) < 1e-9);

  // lambda adds exactly lambda * sum ||W||^2.
  double l0 = loss(zero, b, 0.0, none);
  MlpParameters q = random_params(4, 3, 3);
  DropoutMasks none3 = DropoutMasks::none(3, 16);
  double base = loss(q, b, 0.0, none3);
  double reg = loss(q, b, 0.25, none3);
  CHECK(reg - base == doctest::Approx(0.25 * q.squared_weight_norm()).epsilon(1e-12));
  (void)l0;

  Batch empty;
  empty.inputs.resize(4, 0);
  empty.labels.resize(0);
  empty.sample_weight.resize(0);
  CHECK_THROWS_AS(loss(zero, empty, 0.0, none), std::invalid_argument);
}

TEST_CASE("loss: doubling the sample weights doubles the BCE term only") {
  MlpParameters p = random_params(6, 5, 13);
  std::mt19937_64 rng(17);
  Batch b = random_batch(6, 24, rng);
  DropoutMasks none = DropoutMasks::none(5, 24);
  double lambda = 0.01;
  double base_bce = loss(p, b, 0.0, none);
  double base_total = loss(p, b, lambda, none);
  Batch doubled = b;
  doubled.sample_weight *= 2.0;
  CHECK(loss(p, doubled, 0.0, none) == doctest::Approx(2.0 * base_bce).epsilon(1e-12));
  CHECK(loss(p, doubled, lambda, none) ==
        doctest::Approx(2.0 * base_bce + (base_total - base_bce)).epsilon(1e-12));
}

TEST_CASE("backward: gradient matches central finite differences (100 draws)") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> pick_in(3, 9), pick_h(2, 6), pick_n(1, 12);
  std::uniform_real_distribution<double> pick_l(0.0, 0.01);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    int input = pick_in(rng), hidden = pick_h(rng), n = pick_n(rng);
    MlpParameters p = random_params(input, hidden, rng());
    Batch b = random_batch(input, n, rng);
    worst = std::max(worst, max_relative_gradient_error(p, b, pick_l(rng)));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("backward: zero gradient at a symmetric stationary point") {
  // All-zero weights with balanced labels over mirrored inputs: p = 0.5
  // everywhere and the (p - y) terms cancel pairwise.
  MlpParameters p = MlpParameters::zeros(3, 4);
  Batch b;
  b.inputs.resize(3, 2);
  b.inputs.col(0) = Vec3(0.7, -0.2, 0.4);
  b.inputs.col(1) = Vec3(0.7, -0.2, 0.4);
  b.labels.resize(2);
  b.labels << 1.0, 0.0;
  b.sample_weight = Eigen::VectorXd::Ones(2);
  DropoutMasks none = DropoutMasks::none(4, 2);
  MlpGradients g = backward(p, b, 0.0, none);
  CHECK(g.w1.norm() == doctest::Approx(0.0));
  CHECK(g.w2.norm() == doctest::Approx(0.0));
  CHECK(g.w3.norm() == doctest::Approx(0.0));
  CHECK(g.b1.norm() == doctest::Approx(0.0));
  // b3 gradient: mean of (p - y) = (0.5 - 1 + 0.5 - 0)/2 = 0.
  CHECK(g.b3[0] == doctest::Approx(0.0));
}

TEST_CASE("backward: l2 contribution is exactly 2 lambda W per layer") {
  MlpParameters p = random_params(5, 4, 23);
  std::mt19937_64 rng(29);
  Batch b = random_batch(5, 8, rng);
  DropoutMasks none = DropoutMasks::none(4, 8);
  MlpGradients g0 = backward(p, b, 0.0, none);
  double lambda = 0.37;
  MlpGradients g1 = backward(p, b, lambda, none);
  CHECK((g1.w1 - g0.w1 - 2.0 * lambda * p.w1).norm() < 1e-12);
  CHECK((g1.w2 - g0.w2 - 2.0 * lambda * p.w2).norm() < 1e-12);
  CHECK((g1.w3 - g0.w3 - 2.0 * lambda * p.w3).norm() < 1e-12);
  CHECK((g1.b1 - g0.b1).norm() == doctest::Approx(0.0));
}

TEST_CASE("train: separable blobs reach 99% accuracy quickly") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<TrainSample> samples;
  for (int i = 0; i < 400; ++i) {
    TrainSample s;
    s.label = i % 2;
    Eigen::Vector2d center = s.label ? Eigen::Vector2d(1.5, 1.0) : Eigen::Vector2d(-1.5, -1.0);
    s.input = center + Eigen::Vector2d(g(rng), g(rng));
    samples.push_back(s);
  }
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 64;
  cfg.hidden_size = 16;
  cfg.dropout = 0.2;
  cfg.l2_lambda = 1e-5;
  cfg.seed = 3;
  TrainResult result = train_mlp(samples, cfg);

  int correct = 0;
  for (const auto& s : samples) {
    double p = forward_eval(result.params, s.input);
    correct += ((p > 0.5) == (s.label == 1));
  }
  CHECK(static_cast<double>(correct) / samples.size() >= 0.99);

  // Training curve on a noise-free run (full batch, no dropout):
  // non-increasing within a 5% tolerance.
  TrainConfig smooth = cfg;
  smooth.dropout = 0.0;
  smooth.batch_size = static_cast<int>(samples.size());
  TrainResult curve = train_mlp(samples, smooth);
  for (size_t e = 1; e < curve.epoch_losses.size(); ++e)
    CHECK(curve.epoch_losses[e] <= curve.epoch_losses[e - 1] * 1.05 + 1e-9);
  CHECK(curve.epoch_losses.back() < curve.epoch_losses.front());
}

TEST_CASE("train: single-class dataset rejected") {
  std::vector<TrainSample> samples(10);
  for (auto& s : samples) {
    s.input = Eigen::VectorXd::Random(3);
    s.label = 1;
  }
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(train_mlp(samples, cfg), std::invalid_argument);
}

TEST_CASE("train: bitwise-identical results under a fixed seed") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<TrainSample> samples;
  for (int i = 0; i < 120; ++i) {
    TrainSample s;
    s.label = i % 2;
    s.input = Eigen::Vector3d(g(rng), g(rng), g(rng) + s.label);
    samples.push_back(s);
  }
  TrainConfig cfg;
  cfg.epochs = 12;
  cfg.batch_size = 32;
  cfg.hidden_size = 8;
  cfg.seed = 99;
  cfg.rebalance = true;
  TrainResult a = train_mlp(samples, cfg);
  TrainResult b = train_mlp(samples, cfg);
  CHECK(a.params.w1 == b.params.w1);
  CHECK(a.params.w2 == b.params.w2);
  CHECK(a.params.w3 == b.params.w3);
  CHECK(a.params.b1 == b.params.b1);
  CHECK(a.epoch_losses == b.epoch_losses);
}

TEST_CASE("bundle: save/load round trip is bitwise and scoring is stable") {
  std::mt19937_64 rng(41);
  MlpParameters params = random_params(2 * 4, 6, 43);

  ModelBundle bundle;
  bundle.params = params;
  bundle.encoding.bins_u = 2;
  bundle.encoding.bins_v = 2;
  bundle.encoding.channels = Channels::p2d;
  bundle.encoding.image_width = 64;
  bundle.encoding.image_height = 64;
  bundle.stats.mean = {32.0, 32.0};
  bundle.stats.stddev = {10.0, 10.0};
  bundle.seed = 7;
  bundle.epochs = 11;
  bundle.final_loss = 0.123456789012345;

  VisibilityRecord rec;
  rec.visible.push_back({0, Vec2(10.0, 50.0), 2.0, Vec3(0.2, -0.1, 2.0)});
  rec.visible.push_back({1, Vec2(40.0, 12.0), 3.0, Vec3(-0.3, 0.2, 3.0)});
  double before = score_viewpoint(bundle, rec);
  CHECK(before > 0.0);
  CHECK(before < 1.0);

  auto path = std::filesystem::temp_directory_path() / "vantage_bundle.vmdl";
  save_bundle(bundle, path);
  ModelBundle loaded = load_bundle(path);
  CHECK(loaded.params.w1 == bundle.params.w1);
  CHECK(loaded.params.b3 == bundle.params.b3);
  CHECK(loaded.stats.mean == bundle.stats.mean);
  CHECK(loaded.final_loss == bundle.final_loss);
  CHECK(score_viewpoint(loaded, rec) == before);  // bitwise-equal forward

  // Empty record still scores (the all-zero input path).
  VisibilityRecord empty;
  double s = score_viewpoint(loaded, empty);
  CHECK(s > 0.0);
  CHECK(s < 1.0);
}

TEST_CASE("bundle: encoding/layer size mismatch is rejected") {
  ModelBundle bundle;
  bundle.params = MlpParameters::zeros(10, 4);
  bundle.encoding.bins_u = 2;
  bundle.encoding.bins_v = 2;
  bundle.encoding.channels = Channels::p2d;  // feature length 8 != 10
  bundle.encoding.image_width = 64;
  bundle.encoding.image_height = 64;
  bundle.stats.mean = {0.0, 0.0};
  bundle.stats.stddev = {1.0, 1.0};
  CHECK_THROWS_AS(bundle.validate(), std::invalid_argument);
}
