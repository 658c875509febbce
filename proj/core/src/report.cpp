#include "spfem/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "spfem/geometry.hpp"

namespace spfem {

std::string to_string(Check::Status status) {
  switch (status) {
    case Check::Status::pass:
      return "pass";
    case Check::Status::fail:
      return "fail";
    case Check::Status::skipped:
      return "skipped";
  }
  return "unknown";
}

void ExperimentReport::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw Error(experiment + ": row has " + std::to_string(row.size()) + " cells for " +
                std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

void ExperimentReport::add_check(std::string name, bool passed, std::string detail) {
  checks.push_back({std::move(name), passed ? Check::Status::pass : Check::Status::fail, std::move(detail)});
}

void ExperimentReport::skip_check(std::string name, std::string detail) {
  checks.push_back({std::move(name), Check::Status::skipped, std::move(detail)});
}

bool ExperimentReport::passed() const {
  for (const auto& c : checks)
    if (c.status == Check::Status::fail) return false;
  return true;
}

std::size_t ExperimentReport::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == name) return k;
  throw Error(experiment + ": no column '" + name + "'");
}

double ExperimentReport::number(std::size_t row, const std::string& name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? 1.0 : 0.0;
  throw Error(experiment + ": column '" + name + "' is not numeric");
}

std::string ExperimentReport::text(std::size_t row, const std::string& name) const {
  return format_cell(rows.at(row).at(column(name)));
}

std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&cell)) return *b ? "true" : "false";
  return std::get<std::string>(cell);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json cell_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    // JSON has no non-finite numbers; keep the CSV spelling
    if (!std::isfinite(*d)) return format_cell(cell);
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  if (const auto* b = std::get_if<bool>(&cell)) return *b;
  return std::get<std::string>(cell);
}

}  // namespace

std::string to_csv(const ExperimentReport& r) {
  std::string out;
  for (std::size_t k = 0; k < r.columns.size(); ++k) {
    if (k) out += ',';
    out += csv_escape(r.columns[k]);
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += csv_escape(format_cell(row[k]));
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const ExperimentReport& r, const std::string& timestamp) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.metadata) meta[k] = v;
  meta["timestamp"] = timestamp;
  j["metadata"] = meta;
  j["columns"] = r.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& c : row) jr.push_back(cell_json(c));
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  j["checks"] = std::move(checks);
  j["passed"] = r.passed();
  return j.dump(2) + "\n";
}

void write_report(const ExperimentReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / r.experiment;
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
  };
  write(base.string() + ".csv", to_csv(r));
  write(base.string() + ".json", to_json(r, utc_timestamp()));
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace spfem
