// Copyright 2026 The PrivGLM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVGLM_CSV_HPP
#define PRIVGLM_CSV_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "privglm/errors.hpp"
#include "privglm/glm.hpp"

namespace privglm {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // Trim surrounding whitespace and a possible trailing carriage return.
    size_t begin = cell.find_first_not_of(" \t\r");
    size_t end = cell.find_last_not_of(" \t\r");
    cells.push_back(begin == std::string::npos
                        ? std::string()
                        : cell.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline bool parse_double(std::string_view text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

// Reads a UTF-8, comma-separated, header-first dataset file with '.' decimal
// points. The named label column becomes the response (binary text labels are
// mapped to {0, 1} in lexicographic order); all remaining columns must be
// numeric and become the design matrix. Missing or non-finite cells are
// rejected with the offending line number.
inline Dataset load_csv(const std::string& path,
                        const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw DataError("load_csv: no rows in '" + path + "'");
  const std::vector<std::string> header = detail::split_csv_line(line);
  long label_index = -1;
  for (size_t j = 0; j < header.size(); ++j)
    if (header[j] == label_column) label_index = static_cast<long>(j);
  if (label_index < 0)
    throw DataError("load_csv: unknown label column '" + label_column + "'");

  std::vector<std::vector<double>> features;
  std::vector<std::string> raw_labels;
  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError("load_csv: expected " + std::to_string(header.size()) +
                          " cells, found " + std::to_string(cells.size()),
                      line_number);
    std::vector<double> row;
    row.reserve(cells.size() - 1);
    for (size_t j = 0; j < cells.size(); ++j) {
      if (static_cast<long>(j) == label_index) continue;
      double value;
      if (cells[j].empty())
        throw DataError("load_csv: missing value in column '" + header[j] + "'",
                        line_number);
      if (!detail::parse_double(cells[j], value) || !std::isfinite(value))
        throw DataError("load_csv: non-numeric feature '" + cells[j] +
                            "' in column '" + header[j] + "'",
                        line_number);
      row.push_back(value);
    }
    if (cells[static_cast<size_t>(label_index)].empty())
      throw DataError("load_csv: missing label", line_number);
    raw_labels.push_back(cells[static_cast<size_t>(label_index)]);
    features.push_back(std::move(row));
  }
  if (features.empty()) throw DataError("load_csv: no rows in '" + path + "'");

  // Labels: numeric if every value parses (and is finite); otherwise a binary
  // text labelling mapped to {0, 1}.
  std::vector<double> labels(raw_labels.size());
  bool all_numeric = true;
  for (size_t i = 0; i < raw_labels.size(); ++i) {
    if (!detail::parse_double(raw_labels[i], labels[i]) ||
        !std::isfinite(labels[i])) {
      all_numeric = false;
      break;
    }
  }
  if (!all_numeric) {
    std::map<std::string, double> mapping;
    for (const std::string& label : raw_labels) mapping[label] = 0.0;
    if (mapping.size() != 2)
      throw DataError("load_csv: non-numeric label column must be binary, "
                      "found " +
                      std::to_string(mapping.size()) + " distinct values");
    double code = 0.0;
    for (auto& [_, value] : mapping) value = code++;
    for (size_t i = 0; i < raw_labels.size(); ++i)
      labels[i] = mapping[raw_labels[i]];
  }

  Dataset data;
  const Eigen::Index n = static_cast<Eigen::Index>(features.size());
  const Eigen::Index d = static_cast<Eigen::Index>(features.front().size());
  if (d < 1) throw DataError("load_csv: no feature columns");
  data.x.resize(n, d);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(features[static_cast<size_t>(i)].size()) != d)
      throw DataError("load_csv: ragged row", i + 2);
    for (Eigen::Index j = 0; j < d; ++j)
      data.x(i, j) = features[static_cast<size_t>(i)][static_cast<size_t>(j)];
    data.y[i] = labels[static_cast<size_t>(i)];
  }
  data.validate();
  return data;
}

// Writes a dataset in the same format load_csv reads: label first, then
// feature columns x0, x1, ... Round-trips through load_csv up to float
// formatting (17 significant digits keeps doubles exact).
inline void write_dataset_csv(const std::string& path, const Dataset& data,
                              const std::string& label_column = "y") {
  data.validate();
  std::ofstream out(path);
  if (!out) throw DataError("write_dataset_csv: cannot open '" + path + "'");
  out << label_column;
  for (Eigen::Index j = 0; j < data.d(); ++j) out << ",x" << j;
  out << "\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << data.y[i];
    for (Eigen::Index j = 0; j < data.d(); ++j) out << ',' << data.x(i, j);
    out << "\n";
  }
  if (!out) throw DataError("write_dataset_csv: write failed for '" + path + "'");
}

}  // namespace privglm

#endif  // PRIVGLM_CSV_HPP
