// Copyright 2026 The brdp Authors
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

#ifndef BRDP_ERRORS_H_
#define BRDP_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace brdp {

// Machine-readable failure classes. The CLI maps each to a distinct exit
// code and reports the name() string.
enum class ErrorCategory {
  kDomain,
  kCalibration,
  kAccuracy,
  kResolution,
  kInfeasible,
  kNonTermination,
  kBracket,
  kUnsupportedKernel,
  kSchema,
  kEmptyDataset,
  kIo,
};

std::string_view CategoryName(ErrorCategory category);
int ExitCode(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void Fail(ErrorCategory category,
                              const std::string& message) {
  throw Error(category, message);
}

}  // namespace brdp

#endif  // BRDP_ERRORS_H_
