#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace spfem {

using Cell = std::variant<double, std::int64_t, std::string, bool>;

/// Acceptance predicate evaluated by an experiment. Predicates whose inputs
/// are all flagged rows are skipped rather than failed.
struct Check {
  enum class Status { pass, fail, skipped };
  std::string name;
  Status status = Status::pass;
  std::string detail;
};

std::string to_string(Check::Status status);

/// Tabular experiment output. CSV holds the rows only; JSON holds the same
/// rows plus metadata and checks.
struct ExperimentReport {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Check> checks;
  /// Ordered key/value metadata (config hash, version, notes).
  std::vector<std::pair<std::string, std::string>> metadata;

  /// Appends a row; throws if the cell count differs from the column count.
  void add_row(std::vector<Cell> row);
  void add_check(std::string name, bool passed, std::string detail);
  void skip_check(std::string name, std::string detail);
  /// True when no check failed.
  bool passed() const;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
  std::string text(std::size_t row, const std::string& column) const;
};

/// Doubles are written with 17 significant digits ("inf", "-inf", "nan"
/// for non-finite values); strings containing separators are quoted.
std::string to_csv(const ExperimentReport& report);
/// `timestamp` is stored in the metadata block only.
std::string to_json(const ExperimentReport& report, const std::string& timestamp);

/// Writes <dir>/<experiment>.csv and .json, creating dir if needed.
void write_report(const ExperimentReport& report, const std::string& dir);

/// UTC time as ISO 8601.
std::string utc_timestamp();

/// Cell as it appears in CSV.
std::string format_cell(const Cell& cell);

}  // namespace spfem
