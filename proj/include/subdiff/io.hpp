#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "subdiff/error.hpp"
#include "subdiff/point.hpp"

// Numeric text fixtures: one row per line, whitespace-separated numbers,
// '#' starts a comment, blank lines are skipped, no header.

namespace subdiff {

inline double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::Parse, "line " + std::to_string(line) + ": not a number: '" + std::string(token) + "'");
  }
  return v;
}

inline std::vector<std::vector<double>> read_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream ss(text);
    std::vector<double> row;
    std::string token;
    while (ss >> token) row.push_back(parse_double(token, line));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix read_matrix(std::istream& in) {
  const auto rows = read_rows(in);
  if (rows.empty()) throw Error(Errc::Parse, "matrix file has no rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) {
      throw Error(Errc::Parse, "row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                                   " entries, expected " + std::to_string(rows.front().size()));
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

/// A single row or a single column.
inline Vector read_vector(std::istream& in) {
  const Matrix m = read_matrix(in);
  if (m.rows() != 1 && m.cols() != 1) throw Error(Errc::Parse, "vector file must be one row or one column");
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return in;
}

inline Matrix read_matrix_file(const std::string& path) {
  auto in = open_input(path);
  return read_matrix(in);
}

inline Vector read_vector_file(const std::string& path) {
  auto in = open_input(path);
  return read_vector(in);
}

}  // namespace subdiff
