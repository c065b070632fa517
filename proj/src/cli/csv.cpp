#include "robustmv/cli/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "robustmv/error.hpp"

namespace robustmv::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    os_ << csv_escape(fields[i]);
  }
  os_ << "\r\n";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorCode::Config, "unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Eigen::MatrixXd read_numeric_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  std::vector<std::vector<double>> values;
  std::size_t width = 0;
  int line_no = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::vector<std::string>> parsed;
    try {
      parsed = parse_csv(line);
    } catch (const Error&) {
      throw Error(ErrorCode::Config,
                  path + " row " + std::to_string(line_no) + ": unterminated quote");
    }
    std::vector<double> row;
    for (const auto& raw : parsed.front()) {
      const std::string f = trim(raw);
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size() || errno == ERANGE ||
          !std::isfinite(v)) {
        throw Error(ErrorCode::Config, path + " row " + std::to_string(line_no) +
                                           ": '" + f + "' is not a number");
      }
      row.push_back(v);
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw Error(ErrorCode::Config,
                  path + " row " + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " fields, found " +
                      std::to_string(row.size()));
    }
    values.push_back(std::move(row));
  }
  if (values.empty()) throw Error(ErrorCode::Config, path + ": no data rows");
  Eigen::MatrixXd m(values.size(), width);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) m(i, j) = values[i][j];
  return m;
}

}  // namespace robustmv::cli
