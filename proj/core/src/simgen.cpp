#include "landmark2vec/simgen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace landmark2vec {

namespace {

// SplitMix64 finalizer; decorrelates per-measurement stream seeds.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream_for(std::uint64_t seed, std::size_t index) {
  return std::mt19937_64(mix(mix(seed) ^ static_cast<std::uint64_t>(index)));
}

double per_landmark(const std::vector<double>& values, std::size_t l) {
  return values.size() == 1 ? values.front() : values[l];
}

void check_per_landmark(const std::vector<double>& values, std::size_t L, const char* name) {
  if (values.size() != 1 && values.size() != L) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(name) + " needs 1 or " + std::to_string(L) + " values, got " + std::to_string(values.size()));
  }
}

void check_region(const LandmarkMap& map, const Region& region) {
  if (region.lo.size() != map.dim() || region.hi.size() != map.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "region dimension differs from the map");
  }
  if (!(region.hi.array() >= region.lo.array()).all()) {
    throw Error(ErrorCode::kInvalidArgument, "region bounds are inverted");
  }
}

Eigen::VectorXd sample_point(const Region& region, std::mt19937_64& rng) {
  Eigen::VectorXd p(region.lo.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    p(k) = std::uniform_real_distribution<double>(region.lo(k), region.hi(k))(rng);
  }
  return p;
}

// Shared driver: draws agent i, then asks `observe` for the L readings.
template <typename Observe>
MeasurementSet generate(const LandmarkMap& map, std::size_t count, const Region& region, std::uint64_t seed,
                        Observe&& observe) {
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "measurement count must be >= 1");
  check_region(map, region);
  const std::size_t L = map.size();
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(count), map.dim());
  std::vector<MeasurementVector> measurements;
  measurements.reserve(count);
  std::vector<double> distance(L);

  for (std::size_t i = 0; i < count; ++i) {
    auto rng = stream_for(seed, i);
    const Eigen::VectorXd agent = sample_point(region, rng);
    coords.row(static_cast<Eigen::Index>(i)) = agent.transpose();
    for (std::size_t l = 0; l < L; ++l) {
      distance[l] = (map.coords().row(static_cast<Eigen::Index>(l)).transpose() - agent).norm();
    }
    measurements.emplace_back(observe(distance, rng));
  }
  return MeasurementSet(L, std::move(measurements), std::move(coords));
}

}  // namespace

std::string_view to_string(LayoutKind kind) noexcept {
  switch (kind) {
    case LayoutKind::kCircle: return "circle";
    case LayoutKind::kGrid: return "grid";
    case LayoutKind::kUniformRandom: return "uniform_random";
  }
  return "unknown";
}

LayoutKind parse_layout_kind(std::string_view name) {
  if (name == "circle") return LayoutKind::kCircle;
  if (name == "grid") return LayoutKind::kGrid;
  if (name == "uniform_random") return LayoutKind::kUniformRandom;
  throw Error(ErrorCode::kInvalidArgument, "unknown layout '" + std::string(name) + "'");
}

void Layout::validate() const {
  if (landmark_count < 2) throw Error(ErrorCode::kInvalidArgument, "layout needs at least 2 landmarks");
  if (dim != 2 && dim != 3) throw Error(ErrorCode::kInvalidDimension, "layout dimension must be 2 or 3");
  if (!(extent > 0.0)) throw Error(ErrorCode::kInvalidArgument, "extent must be positive");
  if (kind == LayoutKind::kCircle) {
    if (dim != 2) throw Error(ErrorCode::kInvalidDimension, "circle layouts are 2-D");
    if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "circle radius must be positive");
  }
}

void PathlossParams::validate(std::size_t landmark_count) const {
  check_per_landmark(tx_power_dbm, landmark_count, "tx_power");
  check_per_landmark(exponent, landmark_count, "pathloss_exponent");
  for (double n : exponent) {
    if (!(n > 0.0)) throw Error(ErrorCode::kInvalidArgument, "pathloss exponent must be positive");
  }
  if (!(noise_std_db >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise_std must be >= 0");
  if (!(min_distance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "min_distance must be positive");
}

void InverseLinearParams::validate(std::size_t landmark_count) const {
  check_per_landmark(scale, landmark_count, "scale");
  for (double s : scale) {
    if (!(s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "inverse-linear scale must be positive");
  }
  if (!(noise_std >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise_std must be >= 0");
  if (!(min_distance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "min_distance must be positive");
}

LandmarkMap make_layout(const Layout& layout) {
  layout.validate();
  const auto L = static_cast<Eigen::Index>(layout.landmark_count);
  Eigen::MatrixXd c(L, layout.dim);

  switch (layout.kind) {
    case LayoutKind::kCircle:
      for (Eigen::Index l = 0; l < L; ++l) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(L);
        c(l, 0) = layout.radius * std::cos(angle);
        c(l, 1) = layout.radius * std::sin(angle);
      }
      break;
    case LayoutKind::kGrid: {
      const double root = layout.dim == 2 ? std::sqrt(static_cast<double>(L)) : std::cbrt(static_cast<double>(L));
      auto side = static_cast<Eigen::Index>(std::ceil(root - 1e-9));
      const double step = layout.extent / static_cast<double>(side);
      for (Eigen::Index l = 0; l < L; ++l) {
        Eigen::Index rest = l;
        for (Eigen::Index k = 0; k < layout.dim; ++k) {
          c(l, k) = -0.5 * layout.extent + (static_cast<double>(rest % side) + 0.5) * step;
          rest /= side;
        }
      }
      break;
    }
    case LayoutKind::kUniformRandom: {
      std::mt19937_64 rng(layout.seed);
      std::uniform_real_distribution<double> u(-0.5 * layout.extent, 0.5 * layout.extent);
      for (Eigen::Index l = 0; l < L; ++l)
        for (Eigen::Index k = 0; k < layout.dim; ++k) c(l, k) = u(rng);
      break;
    }
  }
  return LandmarkMap(std::move(c));
}

Region enclosing_region(const LandmarkMap& map, double margin) {
  const Eigen::VectorXd lo = map.coords().colwise().minCoeff().transpose();
  const Eigen::VectorXd hi = map.coords().colwise().maxCoeff().transpose();
  const Eigen::VectorXd pad = margin * (hi - lo);
  return Region{lo - pad, hi + pad};
}

double pathloss_dbm(const PathlossParams& params, std::size_t landmark, double distance) {
  const double d = std::max(distance, params.min_distance);
  return per_landmark(params.tx_power_dbm, landmark) - 10.0 * per_landmark(params.exponent, landmark) * std::log10(d);
}

double dbm_to_weight(double dbm) { return std::pow(10.0, dbm / 10.0); }

double inverse_linear_observation(const InverseLinearParams& params, std::size_t landmark, double distance) {
  return per_landmark(params.scale, landmark) / std::max(distance, params.min_distance);
}

MeasurementSet gen_pathloss(const LandmarkMap& map, std::size_t count, const Region& region,
                            const PathlossParams& params, std::uint64_t seed) {
  params.validate(map.size());
  return generate(map, count, region, seed, [&](const std::vector<double>& distance, std::mt19937_64& rng) {
    std::normal_distribution<double> shadowing(0.0, params.noise_std_db);
    std::vector<double> m(distance.size());
    for (std::size_t l = 0; l < distance.size(); ++l) {
      const double noise = params.noise_std_db > 0.0 ? shadowing(rng) : 0.0;
      m[l] = dbm_to_weight(pathloss_dbm(params, l, distance[l]) + noise);
    }
    return m;
  });
}

MeasurementSet gen_inverse_linear(const LandmarkMap& map, std::size_t count, const Region& region,
                                  const InverseLinearParams& params, std::uint64_t seed) {
  params.validate(map.size());
  return generate(map, count, region, seed, [&](const std::vector<double>& distance, std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, params.noise_std);
    std::vector<double> m(distance.size());
    // Heavy noise can clamp every reading to zero; redraw until one survives.
    for (bool any_positive = false; !any_positive;) {
      for (std::size_t l = 0; l < distance.size(); ++l) {
        const double eta = params.noise_std > 0.0 ? noise(rng) : 0.0;
        m[l] = std::max(0.0, inverse_linear_observation(params, l, distance[l]) + eta);
        any_positive = any_positive || m[l] > 0.0;
      }
    }
    return m;
  });
}

}  // namespace landmark2vec
