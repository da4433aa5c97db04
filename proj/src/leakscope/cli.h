// Copyright 2026 The LeakScope Authors
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
//

// Command-line front end: validate, score, eval, stats and report.

#ifndef LEAKSCOPE_CLI_H_
#define LEAKSCOPE_CLI_H_

#include <iosfwd>

namespace leakscope {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Environment variable naming the default output directory.
inline constexpr char kOutDirEnv[] = "LEAKSCOPE_OUT_DIR";

// Returns the process exit status: 0 on success, 1 when inputs fail
// validation or processing, 2 on usage errors.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace leakscope

#endif  // LEAKSCOPE_CLI_H_
