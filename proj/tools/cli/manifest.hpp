#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace fracsing::cli {

using Json = nlohmann::ordered_json;

std::string sha256_file(const std::filesystem::path& path);

// Records what a command wrote so a rerun can be diffed byte for byte.
struct RunManifest {
  std::string command;
  Json parameters = Json::object();
  Json tolerances = Json::object();
  std::vector<std::filesystem::path> outputs;  // relative to the out dir

  Json to_json(const std::filesystem::path& out_dir) const;
  // Writes manifest.json next to the outputs and returns its path.
  std::filesystem::path write(const std::filesystem::path& out_dir) const;
};

std::string tool_version();

// %.17g text for CSV cells and human-readable reports.
std::string fmt17(double x);

void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace fracsing::cli
