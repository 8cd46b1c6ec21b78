#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace vantage {

/// Weights of the 3-layer classifier: input -> hidden -> hidden -> 1 with
/// ReLU + dropout after the hidden layers and a sigmoid output. Weight
/// matrices are stored rows-out x cols-in.
struct MlpParameters {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  int input_size() const { return static_cast<int>(w1.cols()); }
  int hidden_size() const { return static_cast<int>(w1.rows()); }

  static MlpParameters zeros(int input_size, int hidden_size = 300);
  /// He-uniform fan-in initialization, deterministic under seed.
  static MlpParameters he_init(int input_size, int hidden_size, uint64_t seed);

  bool all_finite() const;
  double squared_weight_norm() const;  // sum over the three weight matrices
};

/// Same shapes as MlpParameters; also used for Adam moments.
using MlpGradients = MlpParameters;

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 300;
  int batch_size = 256;
  double dropout = 0.5;
  double l2_lambda = 1e-4;
  int hidden_size = 300;
  // <= 0 means: derive from inverse class frequency on the training set.
  double positive_weight = 0.0;
  double negative_weight = 0.0;
  bool rebalance = false;  // subsample the majority class before training
  uint64_t seed = 1;

  void validate() const;
};

/// A labeled minibatch: one column per sample.
struct Batch {
  Eigen::MatrixXd inputs;        // input_size x n
  Eigen::VectorXd labels;        // n, each 0 or 1
  Eigen::VectorXd sample_weight; // n
};

/// Deterministic per-batch dropout masks (inverted dropout: kept units are
/// scaled by 1/(1-p) at train time, so evaluation applies no scaling).
struct DropoutMasks {
  Eigen::MatrixXd m1, m2;  // hidden x n, entries 0 or 1/(1-p)

  static DropoutMasks draw(int hidden, int n, double dropout, uint64_t seed);
  static DropoutMasks none(int hidden, int n);
};

/// Eval-mode forward: sigmoid(w3 relu(w2 relu(w1 x + b1) + b2) + b3).
double forward_eval(const MlpParameters& params, const Eigen::VectorXd& input);
Eigen::VectorXd forward_eval_batch(const MlpParameters& params,
                                   const Eigen::MatrixXd& inputs);

/// Train-mode forward with fixed dropout masks.
Eigen::VectorXd forward_train(const MlpParameters& params, const Eigen::MatrixXd& inputs,
                              const DropoutMasks& masks);

/// Mean weighted binary cross-entropy plus lambda * sum ||W_l||^2.
/// Probabilities are clamped to [1e-12, 1 - 1e-12] inside the logs.
double loss(const MlpParameters& params, const Batch& batch, double l2_lambda,
            const DropoutMasks& masks);

/// Exact gradient of `loss` for the same fixed dropout masks. When loss_out
/// is non-null it receives the loss of the same forward pass.
MlpGradients backward(const MlpParameters& params, const Batch& batch, double l2_lambda,
                      const DropoutMasks& masks, double* loss_out = nullptr);

/// Adam state (beta1 0.9, beta2 0.999, eps 1e-8).
class AdamOptimizer {
 public:
  AdamOptimizer(int input_size, int hidden_size, double learning_rate);
  void step(MlpParameters& params, const MlpGradients& grads);

 private:
  double lr_;
  int64_t t_ = 0;
  MlpGradients m_, v_;
};

struct TrainSample {
  Eigen::VectorXd input;
  int label = 0;
};

struct TrainResult {
  MlpParameters params;
  std::vector<double> epoch_losses;
  double positive_weight = 1.0;
  double negative_weight = 1.0;
};

/// Shuffled minibatch Adam for config.epochs. Deterministic under
/// config.seed. Throws std::invalid_argument when the dataset lacks one of
/// the two classes.
TrainResult train_mlp(const std::vector<TrainSample>& samples, const TrainConfig& config);

}  // namespace vantage
