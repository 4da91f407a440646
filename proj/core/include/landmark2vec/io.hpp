#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "landmark2vec/embedder.hpp"
#include "landmark2vec/measurement.hpp"

namespace landmark2vec::io {

// Shortest round-trip decimal representation.
std::string format_double(double value);

// Measurement CSV: header m_0..m_{L-1}[,x,y[,z]], one row per measurement.
void write_measurements(std::ostream& out, const MeasurementSet& set);
MeasurementSet read_measurements(std::istream& in);

// Landmark map / layout CSV: header landmark_id,x,y[,z].
void write_map(std::ostream& out, const LandmarkMap& map);
LandmarkMap read_map(std::istream& in);

// Model file: "# landmark2vec model L=<L> d=<d>", L rows of w_in, a blank
// line, then d rows of w_out.
void write_model(std::ostream& out, const EmbeddingModel& model);
EmbeddingModel read_model(std::istream& in);

// JSON-lines, one record per epoch followed by a stop_reason record.
void write_train_log(std::ostream& out, const TrainLog& log);

// File-path conveniences; throw Error(kIo) when the file cannot be opened.
MeasurementSet load_measurements(const std::filesystem::path& path);
LandmarkMap load_map(const std::filesystem::path& path);
EmbeddingModel load_model(const std::filesystem::path& path);
void save_measurements(const std::filesystem::path& path, const MeasurementSet& set);
void save_map(const std::filesystem::path& path, const LandmarkMap& map);
void save_model(const std::filesystem::path& path, const EmbeddingModel& model);
void save_train_log(const std::filesystem::path& path, const TrainLog& log);

}  // namespace landmark2vec::io
