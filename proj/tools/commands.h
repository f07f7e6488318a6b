// Copyright 2026 The qloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef QLOOP_TOOLS_COMMANDS_H
#define QLOOP_TOOLS_COMMANDS_H

#include <ostream>
#include <string>
#include <vector>

#include "qloop/error.h"

namespace qloop::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 2,
    kExitNumeric = 3,
    kExitIo = 4,
};

ExitCode exit_code_for(ErrorKind kind);

/// Parses `args` (without the program name), runs the subcommand and returns
/// the process exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace qloop::cli

#endif  // QLOOP_TOOLS_COMMANDS_H
