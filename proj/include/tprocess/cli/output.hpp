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

#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tprocess/numerics.hpp"

namespace tprocess::cli {

/// 17 significant digits; non-finite values print as nan, inf, -inf.
std::string fmt(double x);

std::string artifact_version();

/// Output directory whose files all start with "# seed=<seed> config_hash=<hash>".
class OutputDir {
 public:
  OutputDir(const std::string& dir, std::uint64_t seed, std::string config_hash);

  std::ofstream open(const std::string& name) const;
  void write_json(const std::string& name, const nlohmann::json& value) const;
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  const std::string& header() const { return header_; }

 private:
  std::filesystem::path dir_;
  std::string header_;
};

/// Row-oriented CSV writer.
class CsvWriter {
 public:
  explicit CsvWriter(std::ofstream& out) : out_(out) {}
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  void end_row();

 private:
  std::ofstream& out_;
  bool first_ = true;
};

/// Runs body(i) for i in [0, n) on up to `threads` workers. If any call
/// throws, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

nlohmann::json to_json(const VectorXd& v);

}  // namespace tprocess::cli
