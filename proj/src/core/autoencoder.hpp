#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace zeroday {

enum class Activation { tanh, relu, linear };
enum class LossKind { mse, mae };

std::string to_string(Activation a);
std::string to_string(LossKind k);
Activation activation_from_string(const std::string& s);
LossKind loss_from_string(const std::string& s);

// Symmetric feed-forward reconstruction network: equal input/output
// widths, at least one hidden layer, bottleneck narrower than the input.
// The output layer is always linear.
struct Architecture {
  std::vector<std::size_t> layer_widths;  // input, hidden..., output
  Activation hidden_activation = Activation::tanh;
};

void validate(const Architecture& arch);

struct AutoencoderModel {
  Architecture architecture;
  std::vector<Matrix> weights;  // weights[l] maps width[l] -> width[l+1]
  std::vector<std::vector<double>> biases;
  LossKind loss_kind = LossKind::mse;
  double l2_lambda = 0.0;
  std::uint64_t init_seed = 0;
  std::string pipeline_fingerprint;  // transform this model was trained behind

  std::size_t input_width() const { return architecture.layer_widths.front(); }
  std::size_t n_layers() const { return weights.size(); }
  std::string fingerprint() const;
};

// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero,
// deterministic in seed.
AutoencoderModel build_autoencoder(const Architecture& arch, LossKind loss,
                                   double l2_lambda, std::uint64_t seed);

std::vector<double> forward(const AutoencoderModel& model,
                            std::span<const double> x);

// Per-instance error with the feature-mean convention: MSE is the mean
// squared residual over features, MAE the mean absolute residual.
double reconstruction_error(std::span<const double> x,
                            std::span<const double> reconstruction,
                            LossKind kind);

struct GradientSet {
  std::vector<Matrix> weight_grads;
  std::vector<std::vector<double>> bias_grads;
  double data_loss = 0.0;  // batch-mean reconstruction term, without L2
};

// Exact gradients of: batch-mean reconstruction loss + l2 * sum(w^2).
// Biases carry no L2 term.
GradientSet gradients(const AutoencoderModel& model, const Matrix& batch,
                      std::size_t threads = 1);

// Mean per-row reconstruction loss over a matrix.
double dataset_loss(const AutoencoderModel& model, const Matrix& x,
                    std::size_t threads = 1);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 1024;
  double learning_rate = 1e-3;
  double l2_lambda = 0.0;
  LossKind loss_kind = LossKind::mse;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  std::vector<double> train_loss;       // running mean over the epoch's batches
  std::vector<double> validation_loss;  // full validation pass per epoch
};

// Mini-batch Adam over shuffled epochs; the final short batch is kept.
// cfg.loss_kind / cfg.l2_lambda are applied to the model. Deterministic
// in cfg.seed and independent of the thread count.
TrainHistory train(AutoencoderModel& model, const TrainConfig& cfg,
                   const Matrix& train_set, const Matrix& validation_set,
                   std::size_t threads = 1);

// Per-row reconstruction errors, order preserving. The metric defaults
// to the model's training loss; pass `metric` to force another one.
std::vector<double> score(const AutoencoderModel& model, const Matrix& x,
                          std::size_t threads = 1,
                          std::optional<LossKind> metric = std::nullopt);

// Fraction of scores strictly above the threshold.
double detect(std::span<const double> scores, double threshold);

struct SearchSpace {
  std::vector<Architecture> architectures;
  std::vector<double> learning_rates;
  std::vector<std::size_t> epoch_counts;
  std::vector<double> l2_lambdas;
  std::size_t budget = 1;
  std::uint64_t seed = 0;
  std::size_t batch_size = 1024;
};

struct SearchTrial {
  std::size_t index = 0;
  Architecture architecture;
  TrainConfig config;  // full sampled epoch count
  double validation_loss = 0.0;
};

struct SearchResult {
  std::size_t best_index = 0;
  std::vector<SearchTrial> trials;
  const SearchTrial& best() const { return trials[best_index]; }
};

// Uniform sampling (with replacement) over the space's cross-product.
// Trials train at min(10, sampled epochs) to bound cost; the reported
// config keeps the full epoch count. Ties break toward the earlier trial.
SearchResult random_search(const SearchSpace& space, LossKind loss,
                           const Matrix& train_set, const Matrix& validation_set,
                           std::size_t threads = 1);

std::string autoencoder_to_text(const AutoencoderModel& model);
AutoencoderModel autoencoder_from_text(const std::string& text);
void save_autoencoder(const AutoencoderModel& model, const std::string& path);
AutoencoderModel load_autoencoder(const std::string& path);

}  // namespace zeroday
