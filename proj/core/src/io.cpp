#include "landmark2vec/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace landmark2vec::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view field, std::size_t line_no) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    parse_error(line_no, "'" + std::string(field) + "' is not a number");
  }
  return value;
}

int parse_int(std::string_view field, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    parse_error(line_no, "'" + std::string(field) + "' is not an integer");
  }
  return value;
}

bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// Coordinate header tail: x,y or x,y,z.
int coordinate_columns(const std::vector<std::string_view>& header, std::size_t first) {
  static constexpr std::array<std::string_view, 3> kAxes{"x", "y", "z"};
  const std::size_t count = header.size() - first;
  if (count != 2 && count != 3) return -1;
  for (std::size_t k = 0; k < count; ++k) {
    if (header[first + k] != kAxes[k]) return -1;
  }
  return static_cast<int>(count);
}

void write_row(std::ostream& out, const auto& values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_double(v);
    first = false;
  }
  out << '\n';
}

template <typename T>
T with_file(const std::filesystem::path& path, T (*reader)(std::istream&)) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  try {
    return reader(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

template <typename T>
void to_file(const std::filesystem::path& path, const T& value, void (*writer)(std::ostream&, const T&)) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  writer(out, value);
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_measurements(std::ostream& out, const MeasurementSet& set) {
  const std::size_t L = set.landmark_count();
  for (std::size_t l = 0; l < L; ++l) out << (l ? "," : "") << "m_" << l;
  const int dim = set.has_coords() ? static_cast<int>(set.coords().cols()) : 0;
  static constexpr std::array<const char*, 3> kAxes{"x", "y", "z"};
  for (int k = 0; k < dim; ++k) out << ',' << kAxes[static_cast<std::size_t>(k)];
  out << '\n';

  std::vector<double> row(L + static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto values = set[i].values();
    std::copy(values.begin(), values.end(), row.begin());
    for (int k = 0; k < dim; ++k) row[L + static_cast<std::size_t>(k)] = set.coords()(static_cast<Eigen::Index>(i), k);
    write_row(out, row);
  }
}

MeasurementSet read_measurements(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw Error(ErrorCode::kParse, "empty measurement file");

  const auto header = split_fields(line);
  std::size_t L = 0;
  while (L < header.size() && header[L] == "m_" + std::to_string(L)) ++L;
  if (L < 2) parse_error(line_no, "header must start with m_0,m_1,...");
  int dim = 0;
  if (L < header.size()) {
    dim = coordinate_columns(header, L);
    if (dim < 0) parse_error(line_no, "unexpected header columns after m_" + std::to_string(L - 1));
  }

  std::vector<MeasurementVector> measurements;
  std::vector<double> coords;
  while (next_line(in, line, line_no)) {
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      parse_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> values(L);
    for (std::size_t l = 0; l < L; ++l) values[l] = parse_double(fields[l], line_no);
    for (int k = 0; k < dim; ++k) coords.push_back(parse_double(fields[L + static_cast<std::size_t>(k)], line_no));
    try {
      measurements.emplace_back(std::move(values));
    } catch (const Error& e) {
      parse_error(line_no, e.message());
    }
  }

  std::optional<Eigen::MatrixXd> coord_matrix;
  if (dim > 0) {
    coord_matrix = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        coords.data(), static_cast<Eigen::Index>(measurements.size()), dim);
  }
  return MeasurementSet(L, std::move(measurements), std::move(coord_matrix));
}

void write_map(std::ostream& out, const LandmarkMap& map) {
  out << "landmark_id,x,y" << (map.dim() == 3 ? ",z" : "") << '\n';
  for (std::size_t l = 0; l < map.size(); ++l) {
    out << map.ids()[l];
    for (int k = 0; k < map.dim(); ++k) out << ',' << format_double(map.coords()(static_cast<Eigen::Index>(l), k));
    out << '\n';
  }
}

LandmarkMap read_map(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw Error(ErrorCode::kParse, "empty map file");
  const auto header = split_fields(line);
  if (header.empty() || header[0] != "landmark_id") parse_error(line_no, "header must start with landmark_id");
  const int dim = coordinate_columns(header, 1);
  if (dim < 0) parse_error(line_no, "header must be landmark_id,x,y[,z]");

  std::vector<int> ids;
  std::vector<double> coords;
  while (next_line(in, line, line_no)) {
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      parse_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    ids.push_back(parse_int(fields[0], line_no));
    for (int k = 0; k < dim; ++k) coords.push_back(parse_double(fields[1 + static_cast<std::size_t>(k)], line_no));
  }
  Eigen::MatrixXd c = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      coords.data(), static_cast<Eigen::Index>(ids.size()), dim);
  return LandmarkMap(std::move(c), std::move(ids));
}

void write_model(std::ostream& out, const EmbeddingModel& model) {
  out << "# landmark2vec model L=" << model.landmark_count() << " d=" << model.dim() << '\n';
  for (Eigen::Index r = 0; r < model.w_in.rows(); ++r) write_row(out, model.w_in.row(r));
  out << '\n';
  for (Eigen::Index r = 0; r < model.w_out.rows(); ++r) write_row(out, model.w_out.row(r));
}

EmbeddingModel read_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw Error(ErrorCode::kParse, "empty model file");
  static const std::regex kHeader(R"(#\s*landmark2vec model L=(\d+) d=(\d+)\s*)");
  std::smatch match;
  if (!std::regex_match(line, match, kHeader)) parse_error(line_no, "missing '# landmark2vec model L=<L> d=<d>' header");
  const auto L = static_cast<Eigen::Index>(std::stoul(match[1].str()));
  const auto d = static_cast<Eigen::Index>(std::stoul(match[2].str()));
  if (L < 2) parse_error(line_no, "L must be >= 2");
  if (d != 2 && d != 3) parse_error(line_no, "d must be 2 or 3");

  auto read_block = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd block(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!next_line(in, line, line_no)) parse_error(line_no, "unexpected end of model file");
      const auto fields = split_fields(line);
      if (static_cast<Eigen::Index>(fields.size()) != cols) {
        parse_error(line_no, "expected " + std::to_string(cols) + " values, got " + std::to_string(fields.size()));
      }
      for (Eigen::Index c = 0; c < cols; ++c) block(r, c) = parse_double(fields[static_cast<std::size_t>(c)], line_no);
    }
    return block;
  };

  EmbeddingModel model;
  model.w_in = read_block(L, d);
  if (!next_line(in, line, line_no) || !trim(line).empty()) parse_error(line_no, "expected blank separator line");
  model.w_out = read_block(d, L);
  while (next_line(in, line, line_no)) {
    if (!trim(line).empty()) parse_error(line_no, "trailing data after w_out");
  }
  if (!model.all_finite()) throw Error(ErrorCode::kParse, "model contains non-finite weights");
  return model;
}

void write_train_log(std::ostream& out, const TrainLog& log) {
  for (const auto& e : log.epochs) {
    nlohmann::ordered_json record;
    record["epoch"] = e.epoch;
    record["train_loss"] = e.train_loss;
    record["val_loss"] = e.val_loss;
    out << record.dump() << '\n';
  }
  nlohmann::ordered_json last;
  last["stop_reason"] = std::string(to_string(log.stop_reason));
  out << last.dump() << '\n';
}

MeasurementSet load_measurements(const std::filesystem::path& path) { return with_file(path, &read_measurements); }
LandmarkMap load_map(const std::filesystem::path& path) { return with_file(path, &read_map); }
EmbeddingModel load_model(const std::filesystem::path& path) { return with_file(path, &read_model); }

void save_measurements(const std::filesystem::path& path, const MeasurementSet& set) {
  to_file(path, set, &write_measurements);
}
void save_map(const std::filesystem::path& path, const LandmarkMap& map) { to_file(path, map, &write_map); }
void save_model(const std::filesystem::path& path, const EmbeddingModel& model) { to_file(path, model, &write_model); }
void save_train_log(const std::filesystem::path& path, const TrainLog& log) { to_file(path, log, &write_train_log); }

}  // namespace landmark2vec::io
