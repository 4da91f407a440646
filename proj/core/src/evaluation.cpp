#include "landmark2vec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace landmark2vec {

namespace {

constexpr double kSingularity = 1e-10;

void check_compatible(const LandmarkMap& true_map, const LandmarkMap& est_map) {
  if (true_map.size() != est_map.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "maps hold different landmark counts");
  }
  if (true_map.dim() != est_map.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "maps have different dimensions");
  }
  if (true_map.size() < static_cast<std::size_t>(est_map.dim()) + 1) {
    throw Error(ErrorCode::kDegenerateConfiguration, "need at least d+1 landmarks for an affine fit");
  }
}

// Landmark indices sorted by angle about the map centroid.
std::vector<std::size_t> angular_order(const LandmarkMap& map) {
  const Eigen::MatrixXd& c = map.coords();
  const Eigen::RowVectorXd centroid = c.colwise().mean();
  const Eigen::MatrixXd rel = c.rowwise() - centroid;
  const double spread = rel.rowwise().norm().maxCoeff();

  std::vector<double> angle(map.size());
  for (Eigen::Index l = 0; l < rel.rows(); ++l) {
    if (rel.row(l).norm() <= 1e-12 * spread || spread == 0.0) {
      throw Error(ErrorCode::kDegenerateConfiguration,
                  "landmark " + std::to_string(l) + " coincides with the centroid");
    }
    angle[static_cast<std::size_t>(l)] = std::atan2(rel(l, 1), rel(l, 0));
  }
  std::vector<std::size_t> order(map.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
  return order;
}

}  // namespace

AffineFit fit_affine(const LandmarkMap& true_map, const LandmarkMap& est_map) {
  check_compatible(true_map, est_map);
  const Eigen::Index L = static_cast<Eigen::Index>(est_map.size());
  const Eigen::Index d = est_map.dim();

  Eigen::MatrixXd design(L, d + 1);
  design.leftCols(d) = est_map.coords();
  design.col(d).setOnes();

  const Eigen::MatrixXd normal = design.transpose() * design;
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(normal, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(eig.minCoeff() > kSingularity * eig.maxCoeff())) {
    throw Error(ErrorCode::kDegenerateConfiguration, "estimated landmarks are collinear/coplanar");
  }
  const Eigen::MatrixXd theta = normal.llt().solve(design.transpose() * true_map.coords());

  AffineFit fit;
  fit.A = theta.topRows(d).transpose();
  fit.b = theta.row(d).transpose();
  fit.ssme = (true_map.coords() - design * theta).squaredNorm();
  return fit;
}

double ssme(const LandmarkMap& true_map, const LandmarkMap& est_map) { return fit_affine(true_map, est_map).ssme; }

double total_variance(const LandmarkMap& map) {
  const Eigen::RowVectorXd centroid = map.coords().colwise().mean();
  return (map.coords().rowwise() - centroid).squaredNorm();
}

double cyclic_order_score(const LandmarkMap& true_map, const LandmarkMap& est_map) {
  if (true_map.dim() != 2 || est_map.dim() != 2) {
    throw Error(ErrorCode::kInvalidDimension, "cyclic order score needs 2-D maps");
  }
  if (true_map.size() != est_map.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "maps hold different landmark counts");
  }
  const std::size_t L = true_map.size();
  if (L < 3) throw Error(ErrorCode::kInvalidArgument, "cyclic order score needs L >= 3");

  const auto true_order = angular_order(true_map);
  const auto est_order = angular_order(est_map);
  std::vector<std::size_t> est_pos(L);
  for (std::size_t k = 0; k < L; ++k) est_pos[est_order[k]] = k;

  // Adjacency in a cycle is unchanged by rotating or reflecting it, so no
  // explicit search over those symmetries is needed.
  std::size_t kept = 0;
  for (std::size_t k = 0; k < L; ++k) {
    const std::size_t a = est_pos[true_order[k]];
    const std::size_t b = est_pos[true_order[(k + 1) % L]];
    const std::size_t gap = a > b ? a - b : b - a;
    if (gap == 1 || gap == L - 1) ++kept;
  }
  return static_cast<double>(kept) / static_cast<double>(L);
}

LandmarkMap wcl_landmarks(const MeasurementSet& set) {
  const Eigen::MatrixXd& coords = set.coords();
  const std::size_t L = set.landmark_count();
  Eigen::MatrixXd est = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(L), coords.cols());
  std::vector<double> weight(L, 0.0);

  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& m = set[i];
    for (std::size_t l = 0; l < L; ++l) {
      if (m[l] == 0.0) continue;
      est.row(static_cast<Eigen::Index>(l)) += m[l] * coords.row(static_cast<Eigen::Index>(i));
      weight[l] += m[l];
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    if (!(weight[l] > 0.0)) {
      throw Error(ErrorCode::kZeroWeightLandmark, "landmark " + std::to_string(l) + " was never observed");
    }
    est.row(static_cast<Eigen::Index>(l)) /= weight[l];
  }
  return LandmarkMap(std::move(est));
}

Eigen::VectorXd wcl_agent(const LandmarkMap& landmarks, const MeasurementVector& m) {
  if (m.size() != landmarks.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "measurement length differs from landmark count");
  }
  Eigen::VectorXd pos = Eigen::VectorXd::Zero(landmarks.dim());
  double weight = 0.0;
  for (std::size_t l = 0; l < m.size(); ++l) {
    if (m[l] == 0.0) continue;
    pos += m[l] * landmarks.point(l);
    weight += m[l];
  }
  if (!(weight > 0.0)) throw Error(ErrorCode::kZeroWeightMeasurement, "measurement carries no weight");
  return pos / weight;
}

EvaluationReport evaluate(const LandmarkMap& true_map, const LandmarkMap& est_map) {
  EvaluationReport report;
  report.fit = fit_affine(true_map, est_map);
  report.ssme_per_landmark = report.fit.ssme / static_cast<double>(true_map.size());
  const double spread = total_variance(true_map);
  report.ssme_normalized = spread > 0.0 ? report.fit.ssme / spread : 0.0;
  if (true_map.dim() == 2 && true_map.size() >= 3) {
    report.cyclic_order_score = cyclic_order_score(true_map, est_map);
  }
  return report;
}

}  // namespace landmark2vec
