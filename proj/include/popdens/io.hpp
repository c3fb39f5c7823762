#pragma once

// Flat-file formats: field CSV `x,y,u`, history CSV, JSON reports.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "popdens/descent_solver.hpp"
#include "popdens/diagnostics.hpp"

namespace popdens {

/// Header `x,y,u`, one row per node with x varying fastest, 12 significant digits.
void write_field_csv(std::ostream& out, const ScalarField& u);
void write_field_csv(const std::filesystem::path& path, const ScalarField& u);

/// Rebuilds the grid from the coordinates. Throws ConfigError if the file is
/// not a complete square grid written by write_field_csv.
ScalarField read_field_csv(std::istream& in);
ScalarField read_field_csv(const std::filesystem::path& path);

/// Header `iter,energy,sup_change,contact_area,linear_iters`.
void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history);
void write_history_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history);

nlohmann::json report_to_json(const DiagnosticsReport& report);
nlohmann::json grid_to_json(const Grid& grid);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace popdens
