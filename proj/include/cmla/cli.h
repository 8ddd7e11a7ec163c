// Copyright 2026 The CMLA Authors.
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

#ifndef CMLA_CLI_H_
#define CMLA_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace cmla {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumeric = 3,
};

// Entry point behind the cmla binary. args excludes the program name.
// Subcommands: train, eval, predict, synth, inspect. Reports go to out,
// diagnostics to err; files are written only under the --out directory.
int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace cmla

#endif  // CMLA_CLI_H_
