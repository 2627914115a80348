#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace dyncp::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kNonconvergence = 3,
};

/// Column table written as CSV: '#'-prefixed metadata lines, one header line, numeric rows.
struct CsvTable {
  std::vector<std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void write(std::ostream& out) const;
  /// Parses the format produced by write(); "nan" cells become quiet NaNs.
  static CsvTable read(std::istream& in);
};

/// Everything needed to rerun a command: its argument vector plus resolved parameters.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::string tool_version;
  double elapsed_seconds = 0.0;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace dyncp::cli
