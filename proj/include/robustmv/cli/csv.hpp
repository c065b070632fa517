#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace robustmv::cli {

/// 12 significant digits; NaN becomes an empty field.
std::string format_number(double v);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
};

/// Reads a CSV of numbers, one matrix row per line. Blank lines are skipped.
/// Errors name the file and the 1-based line.
Eigen::MatrixXd read_numeric_csv(const std::string& path);

/// Parses a CSV document (used by tests to check emitted files).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace robustmv::cli
