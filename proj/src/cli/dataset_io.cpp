/*
 * Copyright 2026 The tprocess Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tprocess/cli/dataset_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tprocess/error.hpp"

namespace tprocess::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, long line) {
  const std::string s = trim(raw);
  if (s.empty()) throw DataError("empty value", line);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw DataError("cannot parse '" + s + "' as a number", line);
  if (!std::isfinite(v)) throw DataError("non-finite value '" + s + "'", line);
  return v;
}

}  // namespace

MatrixXd read_table(const std::string& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  long lineno = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw DataError("missing header row");
  if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  for (const auto& c : split(line)) names.push_back(trim(c));
  const std::size_t cols = names.size();

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols) {
      throw DataError("expected " + std::to_string(cols) + " columns, found " + std::to_string(cells.size()), lineno);
    }
    std::vector<double> r;
    r.reserve(cols);
    for (const auto& c : cells) r.push_back(parse_cell(c, lineno));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw DataError("no data rows");

  MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  if (header != nullptr) *header = std::move(names);
  return m;
}

Dataset read_dataset(const std::string& path) {
  const MatrixXd m = read_table(path);
  if (m.cols() < 2) throw DataError("need at least one feature column and one target column");
  return Dataset{m.leftCols(m.cols() - 1), m.col(m.cols() - 1)};
}

Standardization Standardization::fit(const VectorXd& y) {
  Standardization s;
  s.offset = y.mean();
  if (y.size() > 1) {
    const double var = (y.array() - s.offset).square().sum() / static_cast<double>(y.size() - 1);
    if (var > 0.0) s.scale = std::sqrt(var);
  }
  return s;
}

VectorXd Standardization::apply(const VectorXd& y) const { return (y.array() - offset) / scale; }

PredictiveDist Standardization::invert(const PredictiveDist& p) const {
  PredictiveDist out = p;
  out.mean = (p.mean.array() * scale + offset).matrix();
  out.scale = SpdMatrix::symmetrized(p.scale.matrix() * (scale * scale));
  return out;
}

GaussianPredictive Standardization::invert(const GaussianPredictive& p) const {
  GaussianPredictive out;
  out.mean = (p.mean.array() * scale + offset).matrix();
  out.cov = SpdMatrix::symmetrized(p.cov.matrix() * (scale * scale));
  return out;
}

}  // namespace tprocess::cli
