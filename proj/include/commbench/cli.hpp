// Copyright 2026 The commbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "commbench/error.hpp"

namespace commbench {

/// Process exit codes (docs/cli.md).
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitUsage = 2,
  kExitInput = 3,       // unreadable or malformed dataset, missing file, write failure
  kExitFormat = 4,      // cube/CSV parse errors, format migration
  kExitValidation = 5,  // invalid config or values, failed conformance
  kExitAlignment = 6,   // cubes whose axes differ
};

int exit_code_for(ErrorKind kind);

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, diagnostics and progress to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace commbench
