#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "scenred/error.hpp"
#include "scenred/scenario_set.hpp"

namespace scenred {

/// Scenario-set CSV: header `p,v1,...,vT`, one scenario per row, `.` decimal
/// separator, LF line endings. Values are written with 17 significant digits
/// so a save/load cycle is lossless.

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) fail(ErrorKind::Io, "failed to format a double");
  return {buf, ptr};
}

inline double parse_double(std::string_view field, int line_number) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    fail(ErrorKind::ParseError,
         "line " + std::to_string(line_number) + ": '" + std::string(field) + "' is not a number");
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

inline void save_csv(const ScenarioSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << "p";
  for (int t = 1; t <= set.horizon(); ++t) out << ",v" << t;
  out << "\n";
  for (int s = 0; s < set.size(); ++s) {
    out << detail::format_double(set.prob(s));
    for (int t = 0; t < set.horizon(); ++t) out << "," << detail::format_double(set.value(s, t));
    out << "\n";
  }
  if (!out) fail(ErrorKind::Io, "failed to write '" + path + "'");
}

inline ScenarioSet load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::HeaderMismatch, "'" + path + "' has no header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    const auto fields = detail::split_fields(line);
    if (fields.empty() || fields[0] != "p")
      fail(ErrorKind::HeaderMismatch, "header must start with column 'p'");
    if (fields.size() < 2) fail(ErrorKind::HeaderMismatch, "header names no value columns");
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i] != "v" + std::to_string(i))
        fail(ErrorKind::HeaderMismatch, "expected column 'v" + std::to_string(i) + "', found '" +
                                            std::string(fields[i]) + "'");
    }
  }

  std::vector<std::vector<double>> values;
  std::vector<double> probs;
  int line_number = 1;
  std::size_t horizon = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    if (horizon == 0) horizon = fields.size() - 1;
    if (fields.size() != horizon + 1)
      fail(ErrorKind::ParseError, "line " + std::to_string(line_number) + ": expected " +
                                      std::to_string(horizon + 1) + " fields, found " +
                                      std::to_string(fields.size()));
    probs.push_back(detail::parse_double(fields[0], line_number));
    std::vector<double> row;
    row.reserve(horizon);
    for (std::size_t i = 1; i < fields.size(); ++i)
      row.push_back(detail::parse_double(fields[i], line_number));
    values.push_back(std::move(row));
  }
  if (values.empty()) fail(ErrorKind::ParseError, "'" + path + "' contains no scenario rows");
  return {std::move(values), std::move(probs)};
}

/// Scenario-set files in a corpus directory, sorted by filename. Teacher
/// caches (*.target.csv) are skipped.
inline std::vector<std::string> list_corpus_files(const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec))
    fail(ErrorKind::Io, "'" + directory + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
    if (name.size() >= 11 && name.substr(name.size() - 11) == ".target.csv") continue;
    files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorKind::EmptyCorpus, "no scenario CSV files under '" + directory + "'");
  return files;
}

/// Cache path for a corpus file's teacher output: `set.csv` -> `set.target.csv`.
inline std::string teacher_cache_path(const std::string& csv_path) {
  return csv_path.substr(0, csv_path.size() - 4) + ".target.csv";
}

}  // namespace scenred
