#include "landmark2vec/embedder.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace landmark2vec {

namespace {

void check_pair(const TrainingPair& pair, std::size_t L) {
  if (pair.target.size() != L) {
    throw Error(ErrorCode::kDimensionMismatch,
                "target has " + std::to_string(pair.target.size()) + " entries, model has " + std::to_string(L));
  }
  if (pair.input_index >= L) {
    throw Error(ErrorCode::kIndexOutOfRange, "input index " + std::to_string(pair.input_index));
  }
}

// Softmax in place on a preallocated buffer.
void softmax_inplace(Eigen::VectorXd& v) {
  v.array() -= v.maxCoeff();
  v = v.array().exp();
  v /= v.sum();
}

// Adam moment estimates for both weight matrices.
struct AdamState {
  Eigen::MatrixXd m_in, v_in, m_out, v_out;
  std::size_t step = 0;

  explicit AdamState(const EmbeddingModel& model)
      : m_in(Eigen::MatrixXd::Zero(model.w_in.rows(), model.w_in.cols())),
        v_in(m_in),
        m_out(Eigen::MatrixXd::Zero(model.w_out.rows(), model.w_out.cols())),
        v_out(m_out) {}
};

void adam_update(Eigen::MatrixXd& w, Eigen::MatrixXd& m, Eigen::MatrixXd& v, const Eigen::MatrixXd& g,
                 const TrainConfig& cfg, double bias1, double bias2) {
  m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
  v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.cwiseProduct(g);
  w.array() -= cfg.learning_rate * (m.array() / bias1) / ((v.array() / bias2).sqrt() + cfg.adam_epsilon);
}

}  // namespace

std::string_view to_string(Optimizer opt) noexcept {
  return opt == Optimizer::kAdam ? "adam" : "sgd";
}

Optimizer parse_optimizer(std::string_view name) {
  if (name == "sgd") return Optimizer::kSgd;
  if (name == "adam") return Optimizer::kAdam;
  throw Error(ErrorCode::kInvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::kCriterion: return "criterion";
    case StopReason::kMaxEpochs: return "max_epochs";
    case StopReason::kNonFinite: return "non_finite";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  if (dim != 2 && dim != 3) {
    throw Error(ErrorCode::kInvalidDimension, "embedding dimension must be 2 or 3");
  }
  if (context_size < 2) throw Error(ErrorCode::kInvalidN, "context size n must be >= 2");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  }
  if (batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
  if (max_epochs == 0) throw Error(ErrorCode::kInvalidArgument, "max_epochs must be positive");
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::kInvalidArgument, "tau must lie in (0, 1)");
  if (optimizer == Optimizer::kAdam) {
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "adam betas must lie in [0, 1)");
    }
    if (!(adam_epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "adam_epsilon must be positive");
  }
}

std::vector<double> TrainLog::val_losses() const {
  std::vector<double> out;
  out.reserve(epochs.size());
  for (const auto& e : epochs) out.push_back(e.val_loss);
  return out;
}

EmbeddingModel init_model(std::size_t landmark_count, int dim, std::uint64_t seed) {
  if (dim != 2 && dim != 3) {
    throw Error(ErrorCode::kInvalidDimension, "embedding dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (landmark_count < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 landmarks");
  }
  const double half_width = 0.5 / dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-half_width, half_width);

  const auto L = static_cast<Eigen::Index>(landmark_count);
  EmbeddingModel model{Eigen::MatrixXd(L, dim), Eigen::MatrixXd(dim, L)};
  for (Eigen::Index l = 0; l < L; ++l)
    for (Eigen::Index k = 0; k < dim; ++k) model.w_in(l, k) = uniform(rng);
  for (Eigen::Index k = 0; k < dim; ++k)
    for (Eigen::Index l = 0; l < L; ++l) model.w_out(k, l) = uniform(rng);
  return model;
}

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits) {
  Eigen::VectorXd out = logits;
  softmax_inplace(out);
  return out;
}

Eigen::VectorXd hidden(const EmbeddingModel& model, std::size_t input_index) {
  if (input_index >= model.landmark_count()) {
    throw Error(ErrorCode::kIndexOutOfRange, "input index " + std::to_string(input_index));
  }
  return model.w_in.row(static_cast<Eigen::Index>(input_index)).transpose();
}

Eigen::VectorXd forward(const EmbeddingModel& model, std::size_t input_index) {
  const Eigen::VectorXd h = hidden(model, input_index);
  Eigen::VectorXd logits = model.w_out.transpose() * h;
  softmax_inplace(logits);
  return logits;
}

double loss(std::span<const double> output, std::span<const double> target) {
  if (output.size() != target.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "output and target lengths differ");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (target[j] != 0.0) total -= target[j] * std::log(output[j]);
  }
  return total;
}

double loss(const Eigen::VectorXd& output, std::span<const double> target) {
  return loss(std::span<const double>(output.data(), static_cast<std::size_t>(output.size())), target);
}

Gradients backward(const EmbeddingModel& model, const TrainingPair& pair) {
  const std::size_t L = model.landmark_count();
  check_pair(pair, L);
  const auto row = static_cast<Eigen::Index>(pair.input_index);

  const Eigen::VectorXd h = model.w_in.row(row).transpose();
  Eigen::VectorXd delta = model.w_out.transpose() * h;
  softmax_inplace(delta);
  // dLoss/dlogits = output - target, valid because the target sums to one.
  delta -= Eigen::Map<const Eigen::VectorXd>(pair.target.data(), static_cast<Eigen::Index>(L));

  Gradients g{Eigen::MatrixXd::Zero(model.w_in.rows(), model.w_in.cols()), h * delta.transpose()};
  g.w_in.row(row) = (model.w_out * delta).transpose();
  return g;
}

double mean_loss(const EmbeddingModel& model, std::span<const TrainingPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "no pairs to evaluate");
  const std::size_t L = model.landmark_count();
  Eigen::VectorXd out(static_cast<Eigen::Index>(L));
  double total = 0.0;
  for (const auto& pair : pairs) {
    check_pair(pair, L);
    out.noalias() = model.w_out.transpose() * model.w_in.row(static_cast<Eigen::Index>(pair.input_index)).transpose();
    softmax_inplace(out);
    total += loss(out, pair.target);
  }
  return total / static_cast<double>(pairs.size());
}

bool should_stop(std::span<const double> val_losses, double tau) {
  if (val_losses.size() < 2) {
    throw Error(ErrorCode::kTooFewEpochs, "stopping rule needs at least 2 epochs");
  }
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::kInvalidArgument, "tau must lie in (0, 1)");

  double max_delta = -std::numeric_limits<double>::infinity();
  for (std::size_t e = 1; e < val_losses.size(); ++e) {
    max_delta = std::max(max_delta, val_losses[e - 1] - val_losses[e]);
  }
  if (max_delta <= 0.0) return true;
  const double latest = val_losses[val_losses.size() - 2] - val_losses.back();
  return latest / max_delta < tau;
}

TrainResult train(std::span<const TrainingPair> train_pairs, std::span<const TrainingPair> val_pairs,
                  const TrainConfig& config) {
  config.validate();
  if (train_pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "no training pairs");
  const std::size_t L = train_pairs.front().target.size();
  return train(init_model(L, config.dim, config.seed), train_pairs, val_pairs, config);
}

TrainResult train(EmbeddingModel model, std::span<const TrainingPair> train_pairs,
                  std::span<const TrainingPair> val_pairs, const TrainConfig& config) {
  config.validate();
  if (train_pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "no training pairs");
  if (val_pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "no validation pairs");
  if (model.dim() != config.dim) {
    throw Error(ErrorCode::kInvalidDimension, "model dimension differs from config");
  }
  const std::size_t L = model.landmark_count();
  if (config.context_size > L) throw Error(ErrorCode::kInvalidN, "context size exceeds landmark count");
  for (const auto& p : train_pairs) check_pair(p, L);
  for (const auto& p : val_pairs) check_pair(p, L);

  const auto Li = static_cast<Eigen::Index>(L);
  const Eigen::Index d = config.dim;

  std::vector<std::size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Offset so the shuffle stream differs from the one used by init_model.
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  AdamState adam(model);
  Eigen::MatrixXd g_in(Li, d);
  Eigen::MatrixXd g_out(d, Li);
  Eigen::VectorXd out(Li);
  Eigen::VectorXd h(d);

  TrainResult result{std::move(model), {}};
  EmbeddingModel& m = result.model;
  TrainLog& log = result.log;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const EmbeddingModel snapshot = m;
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      g_in.setZero();
      g_out.setZero();
      for (std::size_t k = begin; k < end; ++k) {
        const TrainingPair& pair = train_pairs[order[k]];
        const auto row = static_cast<Eigen::Index>(pair.input_index);
        h = m.w_in.row(row).transpose();
        out.noalias() = m.w_out.transpose() * h;
        softmax_inplace(out);
        epoch_loss += loss(out, pair.target);
        out -= Eigen::Map<const Eigen::VectorXd>(pair.target.data(), Li);
        g_out.noalias() += h * out.transpose();
        g_in.row(row).noalias() += (m.w_out * out).transpose();
      }
      const double inv_batch = 1.0 / static_cast<double>(end - begin);
      g_in *= inv_batch;
      g_out *= inv_batch;

      if (config.optimizer == Optimizer::kSgd) {
        m.w_in.noalias() -= config.learning_rate * g_in;
        m.w_out.noalias() -= config.learning_rate * g_out;
      } else {
        ++adam.step;
        const double bias1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(adam.step));
        const double bias2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(adam.step));
        adam_update(m.w_in, adam.m_in, adam.v_in, g_in, config, bias1, bias2);
        adam_update(m.w_out, adam.m_out, adam.v_out, g_out, config, bias1, bias2);
      }
    }

    const double train_loss = epoch_loss / static_cast<double>(order.size());
    const double val_loss = std::isfinite(train_loss) && m.all_finite()
                                ? mean_loss(m, val_pairs)
                                : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(val_loss)) {
      m = snapshot;
      log.stop_reason = StopReason::kNonFinite;
      return result;
    }

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    log.epochs.push_back({epoch, train_loss, val_loss, elapsed.count()});

    if (log.epochs.size() >= 2) {
      const auto losses = log.val_losses();
      if (should_stop(losses, config.tau)) {
        log.stop_reason = StopReason::kCriterion;
        return result;
      }
    }
  }
  log.stop_reason = StopReason::kMaxEpochs;
  return result;
}

LandmarkMap extract_map(const EmbeddingModel& model) { return LandmarkMap(model.w_in); }

}  // namespace landmark2vec
