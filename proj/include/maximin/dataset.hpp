#pragma once

// CSV dataset ingestion: a header "f0,...,f{d-1},label" followed by one row
// per point with d reals and a +-1 label. No missing values.

#include <cerrno>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "maximin/errors.hpp"
#include "maximin/scoring.hpp"

namespace maximin::dataset {

namespace detail {

inline std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& cell, std::size_t line, std::size_t column) {
  const std::string s = trim(cell);
  if (s.empty())
    throw IngestionError("missing value in column " + std::to_string(column), line);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw IngestionError("column " + std::to_string(column) + ": '" + s + "' is not a finite real",
                         line);
  return v;
}

}  // namespace detail

/// Reads the dataset into a pool whose oracle holds the labels.
inline UnlabeledPool read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw IngestionError("empty file, header expected", line_no);
  const auto header = detail::split_row(detail::trim(line));
  if (header.size() < 2) throw IngestionError("header needs f0..f{d-1} and label", line_no);
  const std::size_t d = header.size() - 1;
  for (std::size_t i = 0; i < d; ++i)
    if (detail::trim(header[i]) != "f" + std::to_string(i))
      throw IngestionError("header column " + std::to_string(i) + " must be 'f" +
                               std::to_string(i) + "', got '" + header[i] + "'",
                           line_no);
  if (detail::trim(header[d]) != "label")
    throw IngestionError("last header column must be 'label'", line_no);

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t pending_blank = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      if (pending_blank == 0) pending_blank = line_no;
      continue;
    }
    if (pending_blank != 0) throw IngestionError("blank row inside data", pending_blank);
    const auto cells = detail::split_row(detail::trim(line));
    if (cells.size() != d + 1)
      throw IngestionError("expected " + std::to_string(d + 1) + " columns, got " +
                               std::to_string(cells.size()),
                           line_no);
    for (std::size_t i = 0; i < d; ++i) values.push_back(detail::parse_real(cells[i], line_no, i));
    const double y = detail::parse_real(cells[d], line_no, d);
    if (y != 1.0 && y != -1.0)
      throw IngestionError("label must be +1 or -1, got '" + detail::trim(cells[d]) + "'", line_no);
    labels.push_back(static_cast<int>(y));
  }
  if (labels.empty()) throw IngestionError("no data rows", line_no);

  UnlabeledPool pool;
  pool.points = Eigen::Map<const Eigen::MatrixXd>(values.data(), static_cast<Eigen::Index>(d),
                                                  static_cast<Eigen::Index>(labels.size()));
  pool.oracle = std::move(labels);
  return pool;
}

inline UnlabeledPool read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path, 0);
  return read_csv(in);
}

inline void write_csv(std::ostream& out, const UnlabeledPool& pool) {
  if (!pool.oracle) throw ArgumentError("writing a dataset needs oracle labels");
  for (std::size_t i = 0; i < pool.dim(); ++i) out << 'f' << i << ',';
  out << "label\n";
  char buf[32];
  for (std::size_t j = 0; j < pool.size(); ++j) {
    for (std::size_t i = 0; i < pool.dim(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g",
                    pool.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out << buf << ',';
    }
    out << (*pool.oracle)[j] << '\n';
  }
}

}  // namespace maximin::dataset
