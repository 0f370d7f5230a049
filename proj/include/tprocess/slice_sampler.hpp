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

#include <functional>

#include "tprocess/numerics.hpp"

namespace tprocess {

/// Log density; -infinity marks points outside the support. NaN is an error.
using LogDensity = std::function<double(const VectorXd&)>;

struct SliceOptions {
  double width = 1.0;
  /// Maximum number of width-sized expansions per coordinate update.
  int max_step_out = 10;
  int max_shrink = 500;
};

struct SliceStats {
  long evaluations = 0;
  long step_outs = 0;
  long shrinks = 0;
  long updates = 0;
};

/// One sweep of univariate stepping-out / shrinkage slice updates over every
/// coordinate in order. `log_p` must hold the density at `x` on entry and is
/// updated alongside it.
void slice_sweep(const LogDensity& density, VectorXd& x, double& log_p, const SliceOptions& options, RngHandle& rng,
                 SliceStats& stats);

}  // namespace tprocess
