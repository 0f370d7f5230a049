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

#include "tprocess/slice_sampler.hpp"

#include <cmath>

namespace tprocess {

namespace {

double checked(const LogDensity& density, const VectorXd& x, SliceStats& stats) {
  ++stats.evaluations;
  const double v = density(x);
  if (std::isnan(v)) throw NonFiniteDensity("slice sampler: log density is NaN");
  return v;
}

}  // namespace

void slice_sweep(const LogDensity& density, VectorXd& x, double& log_p, const SliceOptions& options, RngHandle& rng,
                 SliceStats& stats) {
  if (!std::isfinite(log_p)) throw NonFiniteDensity("slice sampler: chain state has zero density");
  VectorXd trial = x;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    ++stats.updates;
    const double x0 = x(d);
    const double level = log_p + std::log(rng.uniform());

    double left = x0 - options.width * rng.uniform();
    double right = left + options.width;
    auto at = [&](double v) {
      trial(d) = v;
      return checked(density, trial, stats);
    };

    long budget_left = static_cast<long>(std::floor(options.max_step_out * rng.uniform()));
    long budget_right = options.max_step_out - 1 - budget_left;
    while (budget_left > 0 && at(left) > level) {
      left -= options.width;
      --budget_left;
      ++stats.step_outs;
    }
    while (budget_right > 0 && at(right) > level) {
      right += options.width;
      --budget_right;
      ++stats.step_outs;
    }

    bool accepted = false;
    for (int k = 0; k < options.max_shrink; ++k) {
      const double candidate = left + (right - left) * rng.uniform();
      const double v = at(candidate);
      if (v > level) {
        x(d) = candidate;
        log_p = v;
        accepted = true;
        break;
      }
      ++stats.shrinks;
      if (candidate < x0) {
        left = candidate;
      } else {
        right = candidate;
      }
    }
    // Shrinkage converges onto x0, which is always inside the slice.
    if (!accepted) x(d) = x0;
    trial(d) = x(d);
  }
}

}  // namespace tprocess
