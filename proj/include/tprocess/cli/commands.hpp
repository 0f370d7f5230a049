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
#include <optional>
#include <string>

namespace tprocess::cli {

struct CommandArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

/// Each command returns the process exit code; configuration, data and
/// numeric errors propagate as exceptions.
int cmd_regress(const CommandArgs& args);
int cmd_optimize(const CommandArgs& args);
int cmd_sample(const CommandArgs& args);
/// 0 iff every check passes, 3 otherwise.
int cmd_verify(const CommandArgs& args);

}  // namespace tprocess::cli
