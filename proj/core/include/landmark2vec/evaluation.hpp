#pragma once

#include <optional>

#include <Eigen/Core>

#include "landmark2vec/measurement.hpp"

namespace landmark2vec {

/// Least-squares affine alignment true ~= A * est + b.
struct AffineFit {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double ssme = 0.0;
};

/// Fits (A, b) by the normal equations of the design matrix [est, 1].
/// Throws DegenerateConfiguration when the normal matrix is singular
/// (smallest/largest eigenvalue below 1e-10).
AffineFit fit_affine(const LandmarkMap& true_map, const LandmarkMap& est_map);

/// Sum of squared matching errors after the best affine alignment.
double ssme(const LandmarkMap& true_map, const LandmarkMap& est_map);

/// Sum of squared distances of the true landmarks from their centroid.
double total_variance(const LandmarkMap& map);

/// Fraction of adjacencies in the angular (cyclic) order of true_map that are
/// also adjacent in est_map's cyclic order. 2-D only, L >= 3.
double cyclic_order_score(const LandmarkMap& true_map, const LandmarkMap& est_map);

/// Weighted-centroid landmark estimates from labelled measurements.
LandmarkMap wcl_landmarks(const MeasurementSet& set);

/// Weighted-centroid agent estimate from one measurement.
Eigen::VectorXd wcl_agent(const LandmarkMap& landmarks, const MeasurementVector& m);

struct EvaluationReport {
  AffineFit fit;
  double ssme_per_landmark = 0.0;
  double ssme_normalized = 0.0;
  std::optional<double> cyclic_order_score;  // 2-D maps with L >= 3 only
};

EvaluationReport evaluate(const LandmarkMap& true_map, const LandmarkMap& est_map);

}  // namespace landmark2vec
