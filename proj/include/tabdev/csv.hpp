#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tabdev/error.hpp"
#include "tabdev/matrix.hpp"

namespace tabdev {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_cell(std::string_view cell, std::size_t line, std::size_t column) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("non-numeric cell '" + std::string(cell) + "' at line " + std::to_string(line) +
                         ", column " + std::to_string(column),
                     line, column);
  }
  return value;
}

}  // namespace detail

/// Parses a rectangular numeric CSV (rows = observations). Blank lines are
/// skipped; a UTF-8 byte-order mark is tolerated.
inline Matrix parse_csv_text(std::string_view text, bool has_header) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool header_pending = has_header;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      ++col;
      values.push_back(detail::parse_cell(cell, line_no, col));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = col;
    } else if (col != cols) {
      throw ParseError("ragged row at line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                           " columns, found " + std::to_string(col),
                       line_no, 0);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("CSV contains no data rows", line_no, 0);
  return Matrix(rows, cols, std::move(values));
}

inline Matrix parse_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0, 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.empty()) throw ParseError("empty file " + path.string(), 0, 0);
  return parse_csv_text(text, has_header);
}

/// A single-row CSV read as a vector.
inline std::vector<double> parse_csv_vector(const std::filesystem::path& path) {
  const Matrix m = parse_csv(path, false);
  if (m.rows() != 1) throw ParseError("expected a single row in " + path.string(), 0, 0);
  return {m.data().begin(), m.data().end()};
}

}  // namespace tabdev
