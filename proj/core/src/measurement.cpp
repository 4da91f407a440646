#include "landmark2vec/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace landmark2vec {

MeasurementVector::MeasurementVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw Error(ErrorCode::kInvalidMeasurement,
                "measurement needs at least 2 landmarks, got " + std::to_string(values_.size()));
  }
  bool any_positive = false;
  for (std::size_t l = 0; l < values_.size(); ++l) {
    const double v = values_[l];
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kInvalidMeasurement,
                  "entry " + std::to_string(l) + " must be finite and >= 0");
    }
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) {
    throw Error(ErrorCode::kInvalidMeasurement, "measurement has no positive entry");
  }
}

MeasurementSet::MeasurementSet(std::size_t landmark_count, std::vector<MeasurementVector> measurements,
                               std::optional<Eigen::MatrixXd> coords)
    : landmark_count_(landmark_count), measurements_(std::move(measurements)), coords_(std::move(coords)) {
  if (landmark_count_ < 2) {
    throw Error(ErrorCode::kInvalidArgument, "landmark count must be >= 2");
  }
  for (std::size_t i = 0; i < measurements_.size(); ++i) {
    if (measurements_[i].size() != landmark_count_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "measurement " + std::to_string(i) + " has " + std::to_string(measurements_[i].size()) +
                      " entries, expected " + std::to_string(landmark_count_));
    }
  }
  if (coords_) {
    if (static_cast<std::size_t>(coords_->rows()) != measurements_.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "coordinate rows must match measurement count");
    }
    if (coords_->cols() != 2 && coords_->cols() != 3) {
      throw Error(ErrorCode::kInvalidDimension, "coordinates must be 2-D or 3-D");
    }
  }
}

const Eigen::MatrixXd& MeasurementSet::coords() const {
  if (!coords_) {
    throw Error(ErrorCode::kMissingGroundTruth, "measurement set carries no coordinates");
  }
  return *coords_;
}

LandmarkMap::LandmarkMap(Eigen::MatrixXd coords) : coords_(std::move(coords)) {
  ids_.resize(static_cast<std::size_t>(coords_.rows()));
  std::iota(ids_.begin(), ids_.end(), 0);
  if (!coords_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "landmark coordinates must be finite");
  }
  if (coords_.rows() > 0 && coords_.cols() != 2 && coords_.cols() != 3) {
    throw Error(ErrorCode::kInvalidDimension, "landmark maps must be 2-D or 3-D");
  }
}

LandmarkMap::LandmarkMap(Eigen::MatrixXd coords, std::vector<int> ids) : LandmarkMap(std::move(coords)) {
  if (ids.size() != ids_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one id per landmark required");
  }
  ids_ = std::move(ids);
}

std::optional<TrainingPair> build_pair(const MeasurementVector& m, std::size_t n) {
  return build_pair(m, n, m.size());
}

std::optional<TrainingPair> build_pair(const MeasurementVector& m, std::size_t n,
                                       std::size_t landmark_count) {
  const std::size_t L = landmark_count;
  if (m.size() != L) {
    throw Error(ErrorCode::kDimensionMismatch,
                "measurement has " + std::to_string(m.size()) + " entries, expected " + std::to_string(L));
  }
  if (n < 2 || n > L) {
    throw Error(ErrorCode::kInvalidN, "n=" + std::to_string(n) + " outside [2, " + std::to_string(L) + "]");
  }
  const auto values = m.values();
  if (std::count_if(values.begin(), values.end(), [](double v) { return v > 0.0; }) < 2) {
    return std::nullopt;
  }

  std::vector<std::size_t> order(L);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable on index order, so equal values keep the lowest index first.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  TrainingPair pair;
  pair.input_index = order.front();
  pair.target.assign(L, 0.0);

  double total = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double v = values[order[k]];
    if (v <= 0.0) break;
    total += v;
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double v = values[order[k]];
    if (v <= 0.0) break;
    pair.target[order[k]] = v / total;
  }
  return pair;
}

Dataset build_dataset(const MeasurementSet& set, std::size_t n) {
  Dataset out;
  out.pairs.reserve(set.size());
  for (const auto& m : set.measurements()) {
    if (auto pair = build_pair(m, n, set.landmark_count())) {
      out.pairs.push_back(std::move(*pair));
    } else {
      ++out.skipped;
    }
  }
  if (out.pairs.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no measurement produced a training pair");
  }
  return out;
}

Split split(std::span<const TrainingPair> pairs, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train fraction must lie in (0, 1)");
  }
  if (pairs.size() < 2) {
    throw Error(ErrorCode::kTooFewPairs, "need at least 2 pairs to split, got " + std::to_string(pairs.size()));
  }
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto train_size = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(pairs.size())));
  train_size = std::clamp<std::size_t>(train_size, 1, pairs.size() - 1);

  Split out;
  out.train.reserve(train_size);
  out.validation.reserve(pairs.size() - train_size);
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < train_size ? out.train : out.validation).push_back(pairs[order[k]]);
  }
  return out;
}

}  // namespace landmark2vec
