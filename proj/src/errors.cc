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

#include "brdp/errors.h"

namespace brdp {

std::string_view CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kDomain:
      return "domain";
    case ErrorCategory::kCalibration:
      return "calibration";
    case ErrorCategory::kAccuracy:
      return "accuracy";
    case ErrorCategory::kResolution:
      return "resolution";
    case ErrorCategory::kInfeasible:
      return "infeasible";
    case ErrorCategory::kNonTermination:
      return "nontermination";
    case ErrorCategory::kBracket:
      return "bracket";
    case ErrorCategory::kUnsupportedKernel:
      return "unsupported_kernel";
    case ErrorCategory::kSchema:
      return "schema";
    case ErrorCategory::kEmptyDataset:
      return "empty_dataset";
    case ErrorCategory::kIo:
      return "io";
  }
  return "unknown";
}

int ExitCode(ErrorCategory category) {
  // 1 is reserved for command-line usage errors.
  return 2 + static_cast<int>(category);
}

}  // namespace brdp
