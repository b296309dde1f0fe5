// Copyright 2026 The abstain-metrology Authors
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

#ifndef ABSTAIN_CLI_HPP
#define ABSTAIN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace abstain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// args excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int run(int argc, char **argv);

std::string version();

}  // namespace abstain::cli

#endif
