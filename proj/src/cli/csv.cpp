#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "dyncp/cli.hpp"
#include "dyncp/errors.hpp"

namespace dyncp::cli {

void CsvTable::write(std::ostream& out) const {
  for (const auto& line : metadata) out << "# " << line << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (std::isnan(row[i])) {
        out << "nan";
      } else {
        out << fmt::format("{:.12g}", row[i]);
      }
    }
    out << '\n';
  }
}

CsvTable CsvTable::read(std::istream& in) {
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      t.metadata.push_back(line.substr(2));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!header) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      header = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      row.push_back(cell == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell));
    }
    if (row.size() != t.columns.size()) throw PreconditionError("CSV row width does not match header");
    t.rows.push_back(std::move(row));
  }
  if (!header) throw PreconditionError("CSV has no header line");
  return t;
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},       {"arguments", arguments},   {"parameters", parameters},
          {"tolerances", tolerances}, {"results", results},       {"tool_version", tool_version},
          {"elapsed_seconds", elapsed_seconds}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.arguments = j.at("arguments").get<std::vector<std::string>>();
    m.parameters = j.value("parameters", nlohmann::json::object());
    m.tolerances = j.value("tolerances", nlohmann::json::object());
    m.results = j.value("results", nlohmann::json::object());
    m.tool_version = j.value("tool_version", std::string{});
    m.elapsed_seconds = j.value("elapsed_seconds", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

}  // namespace dyncp::cli
