// Copyright 2026 The spokenvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef SPOKENVEC_CLI_CLI_HPP_
#define SPOKENVEC_CLI_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace spokenvec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;    // validation, format, or I/O error
inline constexpr int kExitNumerical = 2;  // divergence or failed gradient check

// Runs one subcommand (`features`, `train`, `export`, `eval`, `gradcheck`).
// `args` excludes the program name. Results go to `out`, logs and errors to
// `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace spokenvec::cli

#endif  // SPOKENVEC_CLI_CLI_HPP_
