// Copyright 2026 The HD3 Authors
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


// Entry point of the hd3 command-line tool, split out so tests can drive it
// in-process.

#ifndef HD3_TOOLS_CLI_H_
#define HD3_TOOLS_CLI_H_

#include <ostream>

namespace hd3 {

// Exit codes: 0 on success, 2 on a usage or input error, 1 on anything else.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace hd3

#endif  // HD3_TOOLS_CLI_H_
