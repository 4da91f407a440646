#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "landmark2vec/measurement.hpp"

namespace landmark2vec {

/// Bias-free L -> d -> L network. Row l of w_in is the embedding (map
/// coordinate) of landmark l; the bottleneck is linear and the output layer
/// is a softmax over w_out^T h.
struct EmbeddingModel {
  Eigen::MatrixXd w_in;   // L x d
  Eigen::MatrixXd w_out;  // d x L

  std::size_t landmark_count() const noexcept { return static_cast<std::size_t>(w_in.rows()); }
  int dim() const noexcept { return static_cast<int>(w_in.cols()); }
  bool all_finite() const { return w_in.allFinite() && w_out.allFinite(); }
};

struct Gradients {
  Eigen::MatrixXd w_in;
  Eigen::MatrixXd w_out;
};

enum class Optimizer { kSgd, kAdam };

std::string_view to_string(Optimizer opt) noexcept;
Optimizer parse_optimizer(std::string_view name);

struct TrainConfig {
  std::size_t context_size = 10;  // n, strongest landmarks kept per measurement
  int dim = 2;                   // d
  double learning_rate = 0.05;
  std::size_t batch_size = 256;
  std::size_t max_epochs = 1000;
  double tau = 0.1;
  std::uint64_t seed = 1;
  Optimizer optimizer = Optimizer::kSgd;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // Throws InvalidArgument / InvalidDimension / InvalidN.
  void validate() const;
};

enum class StopReason { kCriterion, kMaxEpochs, kNonFinite };

std::string_view to_string(StopReason reason) noexcept;

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double wall_seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  StopReason stop_reason = StopReason::kMaxEpochs;

  std::vector<double> val_losses() const;
};

struct TrainResult {
  EmbeddingModel model;
  TrainLog log;
};

/// Weights i.i.d. uniform on [-0.5/d, 0.5/d], deterministic in (L, d, seed).
EmbeddingModel init_model(std::size_t landmark_count, int dim, std::uint64_t seed);

/// Numerically stable softmax (max subtracted).
Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits);

/// Bottleneck activation for the one-hot input at `input_index`.
Eigen::VectorXd hidden(const EmbeddingModel& model, std::size_t input_index);

/// Output distribution for the one-hot input at `input_index`.
Eigen::VectorXd forward(const EmbeddingModel& model, std::size_t input_index);

/// Cross-entropy -sum_j t_j ln(o_j), skipping terms where t_j == 0.
double loss(std::span<const double> output, std::span<const double> target);
double loss(const Eigen::VectorXd& output, std::span<const double> target);

/// Exact gradients of loss(forward(model, pair.input_index), pair.target).
Gradients backward(const EmbeddingModel& model, const TrainingPair& pair);

/// Mean cross-entropy of the model over a set of pairs.
double mean_loss(const EmbeddingModel& model, std::span<const TrainingPair> pairs);

/// True once the latest validation-loss decrease falls below `tau` times the
/// largest decrease seen so far, or when the loss has never decreased.
bool should_stop(std::span<const double> val_losses, double tau);

/// Mini-batch training with per-epoch seeded shuffling, stopping on the
/// relative-decrease criterion, max_epochs, or a non-finite loss (in which
/// case the last finite model is returned).
TrainResult train(std::span<const TrainingPair> train_pairs,
                  std::span<const TrainingPair> val_pairs, const TrainConfig& config);

/// Same as above but starting from a caller-supplied model.
TrainResult train(EmbeddingModel model, std::span<const TrainingPair> train_pairs,
                  std::span<const TrainingPair> val_pairs, const TrainConfig& config);

/// Landmark coordinates are the rows of w_in.
LandmarkMap extract_map(const EmbeddingModel& model);

}  // namespace landmark2vec
