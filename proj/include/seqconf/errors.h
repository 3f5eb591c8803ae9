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

#ifndef SEQCONF_ERRORS_H_
#define SEQCONF_ERRORS_H_

#include <stdexcept>
#include <string>

namespace seqconf {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kCapacity = 4,
};

// Base of every error raised by the library. Each subclass carries the exit
// code the command-line tool reports for it.
class Error : public std::runtime_error {
 public:
  Error(const std::string &what, ExitCode code)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

#define SEQCONF_DEFINE_ERROR(Name, Code)                                  \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string &what) : Error(what, ExitCode::Code) {} \
  }

// Invalid configuration values or caller misuse.
SEQCONF_DEFINE_ERROR(ConfigError, kUsage);
SEQCONF_DEFINE_ERROR(UsageError, kUsage);
SEQCONF_DEFINE_ERROR(RangeError, kUsage);

// Malformed or inconsistent data.
SEQCONF_DEFINE_ERROR(AlignmentError, kData);
SEQCONF_DEFINE_ERROR(FormatError, kData);
SEQCONF_DEFINE_ERROR(VocabError, kData);
SEQCONF_DEFINE_ERROR(DecodeError, kData);
SEQCONF_DEFINE_ERROR(DegenerateInputError, kData);
SEQCONF_DEFINE_ERROR(EmptyEvaluationError, kData);
SEQCONF_DEFINE_ERROR(IoError, kData);

// Exhaustive enumeration would exceed its configured cap.
SEQCONF_DEFINE_ERROR(CapacityError, kCapacity);

#undef SEQCONF_DEFINE_ERROR

}  // namespace seqconf

#endif  // SEQCONF_ERRORS_H_
