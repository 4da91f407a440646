#include "cli/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "landmark2vec/io.hpp"

namespace landmark2vec::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorCode::kConfig,
              std::string(key) + ": '" + std::string(value) + "' is not " + std::string(expected));
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) bad_value(key, value, "a number");
  return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value, "a nonnegative integer");
  }
  return out;
}

std::vector<double> to_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    out.push_back(to_double(key, trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) out += (k ? "," : "") + io::format_double(values[k]);
  return out;
}

// Rethrows library validation errors as config errors naming the key.
template <typename F>
auto as_config(std::string_view key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, std::string(key) + ": " + e.message());
  }
}

struct Field {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Field, std::less<>>& registry() {
  using io::format_double;
  static const std::map<std::string, Field, std::less<>> fields = {
      {"layout", {[](RunConfig& c, auto k, auto v) { c.layout.kind = as_config(k, [&] { return parse_layout_kind(v); }); },
                  [](const RunConfig& c) { return std::string(to_string(c.layout.kind)); }}},
      {"landmarks", {[](RunConfig& c, auto k, auto v) { c.layout.landmark_count = to_unsigned(k, v); },
                     [](const RunConfig& c) { return std::to_string(c.layout.landmark_count); }}},
      {"dim", {[](RunConfig& c, auto k, auto v) {
                 const auto d = to_unsigned(k, v);
                 if (d != 2 && d != 3) bad_value(k, v, "2 or 3");
                 c.layout.dim = c.train.dim = static_cast<int>(d);
               },
               [](const RunConfig& c) { return std::to_string(c.layout.dim); }}},
      {"extent", {[](RunConfig& c, auto k, auto v) { c.layout.extent = to_double(k, v); },
                  [](const RunConfig& c) { return format_double(c.layout.extent); }}},
      {"radius", {[](RunConfig& c, auto k, auto v) { c.layout.radius = to_double(k, v); },
                  [](const RunConfig& c) { return format_double(c.layout.radius); }}},
      {"model", {[](RunConfig& c, auto k, auto v) {
                   if (v == "pathloss") c.model = SignalModel::kPathloss;
                   else if (v == "inverse_linear") c.model = SignalModel::kInverseLinear;
                   else bad_value(k, v, "pathloss or inverse_linear");
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.model)); }}},
      {"measurements", {[](RunConfig& c, auto k, auto v) { c.measurements = to_unsigned(k, v); },
                        [](const RunConfig& c) { return std::to_string(c.measurements); }}},
      {"tx_power", {[](RunConfig& c, auto k, auto v) { c.tx_power = to_list(k, v); },
                    [](const RunConfig& c) { return join(c.tx_power); }}},
      {"pathloss_exponent", {[](RunConfig& c, auto k, auto v) { c.pathloss_exponent = to_list(k, v); },
                             [](const RunConfig& c) { return join(c.pathloss_exponent); }}},
      {"scale", {[](RunConfig& c, auto k, auto v) { c.scale = to_list(k, v); },
                 [](const RunConfig& c) { return join(c.scale); }}},
      {"noise_std", {[](RunConfig& c, auto k, auto v) { c.noise_std = to_double(k, v); },
                     [](const RunConfig& c) {
                       return c.model == SignalModel::kPathloss ? format_double(c.pathloss_params().noise_std_db)
                                                                : format_double(c.inverse_linear_params().noise_std);
                     }}},
      {"min_distance", {[](RunConfig& c, auto k, auto v) { c.min_distance = to_double(k, v); },
                        [](const RunConfig& c) { return format_double(c.min_distance); }}},
      {"train_fraction", {[](RunConfig& c, auto k, auto v) { c.train_fraction = to_double(k, v); },
                          [](const RunConfig& c) { return format_double(c.train_fraction); }}},
      {"context_size", {[](RunConfig& c, auto k, auto v) { c.train.context_size = to_unsigned(k, v); },
                        [](const RunConfig& c) { return std::to_string(c.train.context_size); }}},
      {"learning_rate", {[](RunConfig& c, auto k, auto v) { c.train.learning_rate = to_double(k, v); },
                         [](const RunConfig& c) { return format_double(c.train.learning_rate); }}},
      {"batch_size", {[](RunConfig& c, auto k, auto v) { c.train.batch_size = to_unsigned(k, v); },
                      [](const RunConfig& c) { return std::to_string(c.train.batch_size); }}},
      {"max_epochs", {[](RunConfig& c, auto k, auto v) { c.train.max_epochs = to_unsigned(k, v); },
                      [](const RunConfig& c) { return std::to_string(c.train.max_epochs); }}},
      {"tau", {[](RunConfig& c, auto k, auto v) { c.train.tau = to_double(k, v); },
               [](const RunConfig& c) { return format_double(c.train.tau); }}},
      {"optimizer", {[](RunConfig& c, auto k, auto v) { c.train.optimizer = as_config(k, [&] { return parse_optimizer(v); }); },
                     [](const RunConfig& c) { return std::string(to_string(c.train.optimizer)); }}},
      {"adam_beta1", {[](RunConfig& c, auto k, auto v) { c.train.adam_beta1 = to_double(k, v); },
                      [](const RunConfig& c) { return format_double(c.train.adam_beta1); }}},
      {"adam_beta2", {[](RunConfig& c, auto k, auto v) { c.train.adam_beta2 = to_double(k, v); },
                      [](const RunConfig& c) { return format_double(c.train.adam_beta2); }}},
      {"adam_epsilon", {[](RunConfig& c, auto k, auto v) { c.train.adam_epsilon = to_double(k, v); },
                        [](const RunConfig& c) { return format_double(c.train.adam_epsilon); }}},
      {"seed", {[](RunConfig& c, auto k, auto v) { c.seed = to_unsigned(k, v); },
                [](const RunConfig& c) { return std::to_string(c.seed); }}},
  };
  return fields;
}

}  // namespace

std::string_view to_string(SignalModel model) noexcept {
  return model == SignalModel::kPathloss ? "pathloss" : "inverse_linear";
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto& fields = registry();
  const auto it = fields.find(key);
  if (it == fields.end()) throw Error(ErrorCode::kConfig, "unknown key '" + std::string(key) + "'");
  it->second.set(*this, key, trim(value));
  assigned.insert(std::string(key));
}

void RunConfig::validate() const {
  as_config("layout", [&] { layout.validate(); });
  as_config("train", [&] { train.validate(); });
  if (train.dim != layout.dim) throw Error(ErrorCode::kConfig, "dim: layout and embedding dimension differ");
  if (measurements == 0) throw Error(ErrorCode::kConfig, "measurements: must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kConfig, "train_fraction: must lie in (0, 1)");
  }
  if (train.context_size > layout.landmark_count) {
    throw Error(ErrorCode::kConfig, "context_size: n=" + std::to_string(train.context_size) +
                                        " exceeds landmarks=" + std::to_string(layout.landmark_count));
  }
  if (model == SignalModel::kPathloss) {
    as_config("pathloss", [&] { pathloss_params().validate(layout.landmark_count); });
  } else {
    as_config("inverse_linear", [&] { inverse_linear_params().validate(layout.landmark_count); });
  }
}

PathlossParams RunConfig::pathloss_params() const {
  PathlossParams p;
  p.tx_power_dbm = tx_power;
  p.exponent = pathloss_exponent;
  if (noise_std) p.noise_std_db = *noise_std;
  p.min_distance = min_distance;
  return p;
}

InverseLinearParams RunConfig::inverse_linear_params() const {
  InverseLinearParams p;
  p.scale = scale;
  if (noise_std) p.noise_std = *noise_std;
  p.min_distance = min_distance;
  return p;
}

std::map<std::string, std::string> RunConfig::entries() const {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : registry()) out.emplace(key, field.get(*this));
  return out;
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [key, field] : registry()) out.push_back(key);
    return out;
  }();
  return names;
}

void parse_config(std::string_view text, std::string_view source_name, RunConfig& config) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto eol = text.find('\n', start);
    std::string_view line = text.substr(start, eol == std::string_view::npos ? text.npos : eol - start);
    start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = std::string(source_name) + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::kConfig, where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) {
      throw Error(ErrorCode::kConfig, where + "duplicate key '" + std::string(key) + "'");
    }
    try {
      config.set(key, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, where + e.message());
    }
  }
}

void load_config_file(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  parse_config(text.str(), path.string(), config);
}

}  // namespace landmark2vec::cli
