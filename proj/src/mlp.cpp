#include "vantage/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace vantage {

namespace {

constexpr double kProbEps = 1e-12;

Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

Eigen::VectorXd sigmoid_row(const Eigen::RowVectorXd& z) {
  Eigen::VectorXd p(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) p[i] = 1.0 / (1.0 + std::exp(-z[i]));
  return p;
}

}  // namespace

MlpParameters MlpParameters::zeros(int input_size, int hidden_size) {
  MlpParameters p;
  p.w1 = Eigen::MatrixXd::Zero(hidden_size, input_size);
  p.b1 = Eigen::VectorXd::Zero(hidden_size);
  p.w2 = Eigen::MatrixXd::Zero(hidden_size, hidden_size);
  p.b2 = Eigen::VectorXd::Zero(hidden_size);
  p.w3 = Eigen::MatrixXd::Zero(1, hidden_size);
  p.b3 = Eigen::VectorXd::Zero(1);
  return p;
}

MlpParameters MlpParameters::he_init(int input_size, int hidden_size, uint64_t seed) {
  MlpParameters p = zeros(input_size, hidden_size);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](Eigen::MatrixXd& w) {
    double bound = std::sqrt(6.0 / static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
  };
  fill(p.w1);
  fill(p.w2);
  fill(p.w3);
  return p;
}

bool MlpParameters::all_finite() const {
  return w1.allFinite() && w2.allFinite() && w3.allFinite() && b1.allFinite() &&
         b2.allFinite() && b3.allFinite();
}

double MlpParameters::squared_weight_norm() const {
  return w1.squaredNorm() + w2.squaredNorm() + w3.squaredNorm();
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw std::invalid_argument("dropout must lie in [0, 1)");
  if (l2_lambda < 0.0) throw std::invalid_argument("l2 lambda must be >= 0");
  if (hidden_size < 1) throw std::invalid_argument("hidden size must be >= 1");
}

DropoutMasks DropoutMasks::draw(int hidden, int n, double dropout, uint64_t seed) {
  DropoutMasks masks;
  if (dropout <= 0.0) return none(hidden, n);
  double keep = 1.0 - dropout;
  double scale = 1.0 / keep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  masks.m1.resize(hidden, n);
  masks.m2.resize(hidden, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < hidden; ++i)
      masks.m1(i, j) = dist(rng) < keep ? scale : 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < hidden; ++i)
      masks.m2(i, j) = dist(rng) < keep ? scale : 0.0;
  return masks;
}

DropoutMasks DropoutMasks::none(int hidden, int n) {
  DropoutMasks masks;
  masks.m1 = Eigen::MatrixXd::Ones(hidden, n);
  masks.m2 = Eigen::MatrixXd::Ones(hidden, n);
  return masks;
}

Eigen::VectorXd forward_train(const MlpParameters& params, const Eigen::MatrixXd& inputs,
                              const DropoutMasks& masks) {
  if (inputs.rows() != params.w1.cols())
    throw std::invalid_argument("input size does not match layer 1");
  Eigen::MatrixXd h1 =
      relu((params.w1 * inputs).colwise() + params.b1).cwiseProduct(masks.m1);
  Eigen::MatrixXd h2 =
      relu((params.w2 * h1).colwise() + params.b2).cwiseProduct(masks.m2);
  Eigen::RowVectorXd z3 = (params.w3 * h2).row(0).array() + params.b3[0];
  return sigmoid_row(z3);
}

Eigen::VectorXd forward_eval_batch(const MlpParameters& params,
                                   const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != params.w1.cols())
    throw std::invalid_argument("input size does not match layer 1");
  Eigen::MatrixXd h1 = relu((params.w1 * inputs).colwise() + params.b1);
  Eigen::MatrixXd h2 = relu((params.w2 * h1).colwise() + params.b2);
  Eigen::RowVectorXd z3 = (params.w3 * h2).row(0).array() + params.b3[0];
  return sigmoid_row(z3);
}

double forward_eval(const MlpParameters& params, const Eigen::VectorXd& input) {
  return forward_eval_batch(params, input)[0];
}

double loss(const MlpParameters& params, const Batch& batch, double l2_lambda,
            const DropoutMasks& masks) {
  const Eigen::Index n = batch.inputs.cols();
  if (n == 0) throw std::invalid_argument("empty batch");
  Eigen::VectorXd p = forward_train(params, batch.inputs, masks);
  double bce = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double pi = std::clamp(p[i], kProbEps, 1.0 - kProbEps);
    double yi = batch.labels[i];
    bce -= batch.sample_weight[i] * (yi * std::log(pi) + (1.0 - yi) * std::log(1.0 - pi));
  }
  bce /= static_cast<double>(n);
  return bce + l2_lambda * params.squared_weight_norm();
}

MlpGradients backward(const MlpParameters& params, const Batch& batch, double l2_lambda,
                      const DropoutMasks& masks, double* loss_out) {
  const Eigen::Index n = batch.inputs.cols();
  if (n == 0) throw std::invalid_argument("empty batch");

  Eigen::MatrixXd z1 = (params.w1 * batch.inputs).colwise() + params.b1;
  Eigen::MatrixXd h1 = relu(z1).cwiseProduct(masks.m1);
  Eigen::MatrixXd z2 = (params.w2 * h1).colwise() + params.b2;
  Eigen::MatrixXd h2 = relu(z2).cwiseProduct(masks.m2);
  Eigen::RowVectorXd z3 = (params.w3 * h2).row(0).array() + params.b3[0];
  Eigen::VectorXd p = sigmoid_row(z3);

  if (loss_out) {
    double bce = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double pi = std::clamp(p[i], kProbEps, 1.0 - kProbEps);
      double yi = batch.labels[i];
      bce -=
          batch.sample_weight[i] * (yi * std::log(pi) + (1.0 - yi) * std::log(1.0 - pi));
    }
    *loss_out = bce / static_cast<double>(n) + l2_lambda * params.squared_weight_norm();
  }

  // dL/dz3; zero where the probability clamp is active (the clamped loss is
  // locally constant there).
  Eigen::RowVectorXd dz3(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p[i] <= kProbEps || p[i] >= 1.0 - kProbEps)
      dz3[i] = 0.0;
    else
      dz3[i] = batch.sample_weight[i] * (p[i] - batch.labels[i]) / static_cast<double>(n);
  }

  MlpGradients g = MlpParameters::zeros(params.input_size(), params.hidden_size());
  g.w3 = dz3 * h2.transpose();
  g.b3[0] = dz3.sum();

  Eigen::MatrixXd dh2 = params.w3.transpose() * dz3;           // hidden x n
  Eigen::MatrixXd dz2 = dh2.cwiseProduct(masks.m2)
                            .cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  g.w2 = dz2 * h1.transpose();
  g.b2 = dz2.rowwise().sum();

  Eigen::MatrixXd dh1 = params.w2.transpose() * dz2;
  Eigen::MatrixXd dz1 = dh1.cwiseProduct(masks.m1)
                            .cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  g.w1 = dz1 * batch.inputs.transpose();
  g.b1 = dz1.rowwise().sum();

  g.w1 += 2.0 * l2_lambda * params.w1;
  g.w2 += 2.0 * l2_lambda * params.w2;
  g.w3 += 2.0 * l2_lambda * params.w3;
  return g;
}

AdamOptimizer::AdamOptimizer(int input_size, int hidden_size, double learning_rate)
    : lr_(learning_rate),
      m_(MlpParameters::zeros(input_size, hidden_size)),
      v_(MlpParameters::zeros(input_size, hidden_size)) {}

void AdamOptimizer::step(MlpParameters& params, const MlpGradients& grads) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++t_;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  auto update = [&](Eigen::MatrixXd& theta, Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                    const Eigen::MatrixXd& g) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    theta.array() -=
        lr_ * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  };
  auto update_vec = [&](Eigen::VectorXd& theta, Eigen::VectorXd& m, Eigen::VectorXd& v,
                        const Eigen::VectorXd& g) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    theta.array() -=
        lr_ * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  };
  update(params.w1, m_.w1, v_.w1, grads.w1);
  update(params.w2, m_.w2, v_.w2, grads.w2);
  update(params.w3, m_.w3, v_.w3, grads.w3);
  update_vec(params.b1, m_.b1, v_.b1, grads.b1);
  update_vec(params.b2, m_.b2, v_.b2, grads.b2);
  update_vec(params.b3, m_.b3, v_.b3, grads.b3);
}

TrainResult train_mlp(const std::vector<TrainSample>& samples, const TrainConfig& config) {
  config.validate();
  if (samples.empty()) throw std::invalid_argument("empty training set");
  const int input_size = static_cast<int>(samples.front().input.size());

  size_t n_pos = 0;
  for (const auto& s : samples) n_pos += (s.label == 1);
  size_t n_neg = samples.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("training set must contain both classes");

  // Optional majority-class subsampling to a balanced set.
  std::vector<size_t> pool(samples.size());
  std::iota(pool.begin(), pool.end(), size_t{0});
  if (config.rebalance && n_pos != n_neg) {
    std::vector<size_t> pos_idx, neg_idx;
    for (size_t i = 0; i < samples.size(); ++i)
      (samples[i].label == 1 ? pos_idx : neg_idx).push_back(i);
    auto& majority = pos_idx.size() > neg_idx.size() ? pos_idx : neg_idx;
    auto& minority = pos_idx.size() > neg_idx.size() ? neg_idx : pos_idx;
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    std::shuffle(majority.begin(), majority.end(), rng);
    majority.resize(minority.size());
    pool.clear();
    pool.insert(pool.end(), minority.begin(), minority.end());
    pool.insert(pool.end(), majority.begin(), majority.end());
    std::sort(pool.begin(), pool.end());
    n_pos = minority.size();
    n_neg = minority.size();
  }

  double w_pos = config.positive_weight;
  double w_neg = config.negative_weight;
  if (w_pos <= 0.0 || w_neg <= 0.0) {
    // Inverse class frequency, normalized to mean weight 1.
    double total = static_cast<double>(pool.size());
    w_pos = total / (2.0 * static_cast<double>(n_pos));
    w_neg = total / (2.0 * static_cast<double>(n_neg));
  }

  TrainResult result;
  result.positive_weight = w_pos;
  result.negative_weight = w_neg;
  result.params = MlpParameters::he_init(input_size, config.hidden_size, config.seed);
  AdamOptimizer adam(input_size, config.hidden_size, config.learning_rate);

  std::mt19937_64 shuffle_rng(config.seed ^ 0x6a09e667f3bcc909ull);
  uint64_t mask_counter = 0;
  result.epoch_losses.reserve(config.epochs);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(pool.begin(), pool.end(), shuffle_rng);
    double epoch_loss = 0.0;
    size_t batches = 0;
    for (size_t start = 0; start < pool.size(); start += config.batch_size) {
      size_t count = std::min(static_cast<size_t>(config.batch_size), pool.size() - start);
      Batch batch;
      batch.inputs.resize(input_size, count);
      batch.labels.resize(count);
      batch.sample_weight.resize(count);
      for (size_t i = 0; i < count; ++i) {
        const TrainSample& s = samples[pool[start + i]];
        batch.inputs.col(i) = s.input;
        batch.labels[i] = s.label;
        batch.sample_weight[i] = s.label == 1 ? w_pos : w_neg;
      }
      DropoutMasks masks =
          DropoutMasks::draw(config.hidden_size, static_cast<int>(count), config.dropout,
                             config.seed ^ (0xd1b54a32d192ed03ull + ++mask_counter));
      double batch_loss = 0.0;
      MlpGradients grads =
          backward(result.params, batch, config.l2_lambda, masks, &batch_loss);
      adam.step(result.params, grads);
      epoch_loss += batch_loss;
      ++batches;
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(batches));
  }
  return result;
}

}  // namespace vantage
