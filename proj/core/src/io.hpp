#pragma once

// File helpers shared by the readers and writers in core. Not installed.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fracsing {

using Json = nlohmann::ordered_json;

/// 17 significant digits, round-trip exact.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Numeric CSV with one header line. Cells "true"/"false" read as 1/0.
CsvTable read_csv(const std::string& path);

/// foo.csv -> foo.json
std::string sidecar_path(const std::string& csv_path);

void write_json_file(const std::string& path, const Json& j);
std::optional<Json> read_json_if_exists(const std::string& path);

}  // namespace fracsing
