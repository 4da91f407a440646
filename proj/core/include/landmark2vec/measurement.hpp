#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "landmark2vec/error.hpp"

namespace landmark2vec {

/// One observation vector m_i: a nonnegative signal weight per landmark,
/// larger meaning closer/stronger. Validated on construction.
class MeasurementVector {
 public:
  explicit MeasurementVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t l) const { return values_[l]; }

 private:
  std::vector<double> values_;
};

/// A collection of measurement vectors sharing one landmark count, with
/// optional ground-truth agent coordinates (one row per measurement).
class MeasurementSet {
 public:
  MeasurementSet(std::size_t landmark_count, std::vector<MeasurementVector> measurements,
                 std::optional<Eigen::MatrixXd> coords = std::nullopt);

  std::size_t landmark_count() const noexcept { return landmark_count_; }
  std::size_t size() const noexcept { return measurements_.size(); }
  bool empty() const noexcept { return measurements_.empty(); }

  const std::vector<MeasurementVector>& measurements() const noexcept { return measurements_; }
  const MeasurementVector& operator[](std::size_t i) const { return measurements_[i]; }

  bool has_coords() const noexcept { return coords_.has_value(); }
  // Throws MissingGroundTruth when absent.
  const Eigen::MatrixXd& coords() const;

 private:
  std::size_t landmark_count_;
  std::vector<MeasurementVector> measurements_;
  std::optional<Eigen::MatrixXd> coords_;
};

/// One skip-gram style training example: the strongest landmark as a one-hot
/// input (stored as its index) and a probability distribution over the
/// next-strongest context landmarks.
struct TrainingPair {
  std::size_t input_index = 0;
  std::vector<double> target;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

/// Landmark coordinates, one row per landmark, in a 2-D or 3-D frame.
class LandmarkMap {
 public:
  LandmarkMap() = default;
  // ids default to 0..L-1.
  explicit LandmarkMap(Eigen::MatrixXd coords);
  LandmarkMap(Eigen::MatrixXd coords, std::vector<int> ids);

  std::size_t size() const noexcept { return static_cast<std::size_t>(coords_.rows()); }
  int dim() const noexcept { return static_cast<int>(coords_.cols()); }
  const Eigen::MatrixXd& coords() const noexcept { return coords_; }
  const std::vector<int>& ids() const noexcept { return ids_; }
  Eigen::VectorXd point(std::size_t l) const { return coords_.row(static_cast<Eigen::Index>(l)).transpose(); }

 private:
  Eigen::MatrixXd coords_;
  std::vector<int> ids_;
};

/// Builds the training pair for one measurement keeping its n strongest
/// entries. Returns nullopt when fewer than two entries are positive.
/// Ties (argmax and the top-n cut) go to the lowest landmark index.
std::optional<TrainingPair> build_pair(const MeasurementVector& m, std::size_t n);
// As above, additionally checking m against the configured landmark count.
std::optional<TrainingPair> build_pair(const MeasurementVector& m, std::size_t n,
                                       std::size_t landmark_count);

struct Dataset {
  std::vector<TrainingPair> pairs;
  std::size_t skipped = 0;
};

/// One pair per measurement in input order; measurements without context are
/// dropped and counted. Throws EmptyDataset if nothing survives.
Dataset build_dataset(const MeasurementSet& set, std::size_t n);

struct Split {
  std::vector<TrainingPair> train;
  std::vector<TrainingPair> validation;
};

/// Seeded shuffle then partition. The train size is floor(fraction * size),
/// clamped so both sides keep at least one pair.
Split split(std::span<const TrainingPair> pairs, double train_fraction, std::uint64_t seed);

}  // namespace landmark2vec
