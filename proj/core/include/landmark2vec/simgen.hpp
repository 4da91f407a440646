#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "landmark2vec/measurement.hpp"

namespace landmark2vec {

enum class LayoutKind { kCircle, kGrid, kUniformRandom };

std::string_view to_string(LayoutKind kind) noexcept;
LayoutKind parse_layout_kind(std::string_view name);

/// Landmark placement inside the square [-extent/2, extent/2]^d.
struct Layout {
  LayoutKind kind = LayoutKind::kCircle;
  std::size_t landmark_count = 30;
  int dim = 2;
  double extent = 20.0;  // meters
  double radius = 10.0;  // circle only
  std::uint64_t seed = 1;

  void validate() const;
};

/// Axis-aligned box agents are sampled from.
struct Region {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

/// Log-distance pathloss, P = P_T - 10 n log10(max(d, d0)) + eta, eta in dB.
/// tx_power_dbm and exponent hold either one value (shared) or one per landmark.
struct PathlossParams {
  std::vector<double> tx_power_dbm{20.0};
  std::vector<double> exponent{2.0};
  double noise_std_db = 2.0;
  double min_distance = 0.5;

  void validate(std::size_t landmark_count) const;
};

/// Camera-style observation m = s / max(d, d0) + eta, clamped at zero.
struct InverseLinearParams {
  std::vector<double> scale{1.0};
  double noise_std = 0.01;
  double min_distance = 0.5;

  void validate(std::size_t landmark_count) const;
};

LandmarkMap make_layout(const Layout& layout);

/// Bounding box of the map grown by `margin` of its size on every side.
Region enclosing_region(const LandmarkMap& map, double margin = 0.1);

/// Noiseless received power in dBm for landmark l at distance d.
double pathloss_dbm(const PathlossParams& params, std::size_t landmark, double distance);

/// dBm -> milliwatt weight, 10^(P/10).
double dbm_to_weight(double dbm);

/// Noiseless inverse-linear observation for landmark l at distance d.
double inverse_linear_observation(const InverseLinearParams& params, std::size_t landmark,
                                  double distance);

/// Agents i.i.d. uniform over `region`. Measurement i draws from its own
/// stream seeded by (seed, i), so output does not depend on evaluation order.
MeasurementSet gen_pathloss(const LandmarkMap& map, std::size_t count, const Region& region,
                            const PathlossParams& params, std::uint64_t seed);

MeasurementSet gen_inverse_linear(const LandmarkMap& map, std::size_t count, const Region& region,
                                  const InverseLinearParams& params, std::uint64_t seed);

}  // namespace landmark2vec
