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

#include <string>
#include <vector>

#include "tprocess/tp_model.hpp"

namespace tprocess::cli {

/// CSV with a header row, feature columns then one target column. Throws
/// DataError carrying the 1-based file line of the offending row.
Dataset read_dataset(const std::string& path);

/// Same layout without a target split: every column is returned.
MatrixXd read_table(const std::string& path, std::vector<std::string>* header = nullptr);

/// Affine map y -> (y - offset) / scale.
struct Standardization {
  double offset = 0.0;
  double scale = 1.0;

  static Standardization fit(const VectorXd& y);
  VectorXd apply(const VectorXd& y) const;
  PredictiveDist invert(const PredictiveDist& p) const;
  GaussianPredictive invert(const GaussianPredictive& p) const;
};

}  // namespace tprocess::cli
