// Copyright 2026 The bootforge Authors
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

namespace bootforge::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRejected = 1;  // verification or boot failure
inline constexpr int kUsage = 2;

/// Runs one command line. `args` excludes the program name. Human output
/// goes to `out`, diagnostics and usage to `err`; artifacts go to the work
/// directory (--workdir, else $BOOTFORGE_WORKDIR, else ".").
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bootforge::cli
