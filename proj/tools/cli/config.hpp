#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "landmark2vec/embedder.hpp"
#include "landmark2vec/simgen.hpp"

namespace landmark2vec::cli {

enum class SignalModel { kPathloss, kInverseLinear };

std::string_view to_string(SignalModel model) noexcept;

/// Everything a recipe file can set. Keys are flat `name = value` pairs; the
/// same names (with '-' for '_') are accepted as command-line flags.
struct RunConfig {
  Layout layout;
  SignalModel model = SignalModel::kPathloss;
  std::size_t measurements = 100000;
  std::vector<double> tx_power{20.0};
  std::vector<double> pathloss_exponent{2.0};
  std::vector<double> scale{1.0};
  std::optional<double> noise_std;  // model-dependent default when unset
  double min_distance = 0.5;
  double train_fraction = 0.8;
  TrainConfig train;
  std::uint64_t seed = 1;

  // Keys explicitly assigned by a file or flag.
  std::set<std::string> assigned;

  /// Sets one key from its textual value. Throws Error(kConfig) for unknown
  /// keys or malformed values.
  void set(std::string_view key, std::string_view value);

  /// Cross-field checks (e.g. n <= L, fraction in (0,1)).
  void validate() const;

  PathlossParams pathloss_params() const;
  InverseLinearParams inverse_linear_params() const;

  // Stage seeds derived from `seed`.
  std::uint64_t layout_seed() const { return seed; }
  std::uint64_t measurement_seed() const { return seed + 1; }
  std::uint64_t split_seed() const { return seed + 2; }
  std::uint64_t train_seed() const { return seed + 3; }

  /// All keys with their current values, in key order (for manifests).
  std::map<std::string, std::string> entries() const;

  static const std::vector<std::string>& keys();
};

/// Parses a flat key-value recipe. '#' starts a comment; blank lines are
/// ignored; duplicate and unknown keys are rejected with file:line context.
void load_config_file(const std::filesystem::path& path, RunConfig& config);
void parse_config(std::string_view text, std::string_view source_name, RunConfig& config);

}  // namespace landmark2vec::cli
