#pragma once

// File formats: numeric CSV matrices (optional header row), JSON for single
// fits, CSV tables for paths, heatmaps, studies and timings.

#include <json.hpp>
#include <string>

#include "pcglasso/irrepresentability.hpp"
#include "pcglasso/matrix_core.hpp"
#include "pcglasso/model_select.hpp"
#include "pcglasso/pcglasso.hpp"
#include "pcglasso/simulation.hpp"

namespace pcglasso {

/// Parses comma-separated numbers. A first row that does not parse as numbers
/// is taken as a header. Throws parse errors on ragged rows or bad cells.
Matrix parse_csv_matrix(const std::string& text);
Matrix read_csv_matrix(const std::string& path);

/// Shortest text that reads back to the same double.
std::string format_double(double x);
std::string matrix_csv(const Matrix& m);

/// Writes to a temporary file in the same directory, then renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

nlohmann::json matrix_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json fit_json(const FitResult& fit, const SolverConfig& cfg);

std::string path_csv(const PathResult& path);
std::string heatmap_csv(const Heatmap& hm);
std::string study_csv(const StudyReport& report);
nlohmann::json study_json(const StudyReport& report, const StudyConfig& cfg);
std::string timing_csv(const DBenchResult& bench);

}  // namespace pcglasso
