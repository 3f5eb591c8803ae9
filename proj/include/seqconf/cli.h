// Copyright 2026 The Seqconf Authors.
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


#ifndef SEQCONF_CLI_H_
#define SEQCONF_CLI_H_

#include <ostream>

namespace seqconf {

// Runs the command line and returns the process exit code. Final summaries
// go to `out`, progress and errors to `err`.
int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace seqconf

#endif  // SEQCONF_CLI_H_
