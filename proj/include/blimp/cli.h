// Copyright 2026 The Blimp Neurocontrol Authors
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

#ifndef BLIMP_CLI_H_
#define BLIMP_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace blimp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `blimp` tool: subcommands evolve, eval, sysid, compare
// and gen-log. Diagnostics go to `err` as a single line.
int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace blimp

#endif  // BLIMP_CLI_H_
