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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tprocess/cli/commands.hpp"
#include "tprocess/error.hpp"

namespace {

struct Verb {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

CLI::App* add_verb(CLI::App& app, const char* name, const char* help, Verb& v) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", v.config, "JSON config file (defaults apply when omitted)");
  sub->add_option("--out", v.out, "output directory")->capture_default_str();
  sub->add_option("--seed", v.seed, "seed, overrides the config value");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Student-t process regression and Bayesian optimization"};
  app.require_subcommand(1);
  Verb regress, optimize, sample, verify;
  CLI::App* r = add_verb(app, "regress", "fit TP and GP regression models and report test metrics", regress);
  CLI::App* o = add_verb(app, "optimize", "run Bayesian optimization benchmarks", optimize);
  CLI::App* s = add_verb(app, "sample", "draw from the distribution samplers", sample);
  CLI::App* v = add_verb(app, "verify", "run the statistical verification battery", verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  namespace cli = tprocess::cli;
  const auto args = [](const Verb& x) { return cli::CommandArgs{x.config, x.out, x.seed}; };
  try {
    if (*r) return cli::cmd_regress(args(regress));
    if (*o) return cli::cmd_optimize(args(optimize));
    if (*s) return cli::cmd_sample(args(sample));
    if (*v) return cli::cmd_verify(args(verify));
  } catch (const tprocess::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
