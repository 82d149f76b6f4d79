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

#ifndef BRDP_BUDGET_H_
#define BRDP_BUDGET_H_

#include <cmath>
#include <string>

#include "brdp/errors.h"

namespace brdp {

// A privacy budget (epsilon, delta). Used for totals, kernel sub-budgets and
// amplified budgets alike.
struct BudgetPair {
  double epsilon = 0;
  double delta = 0;

  // Throws kDomain unless epsilon > 0 and 0 <= delta <= 1.
  void Validate() const {
    if (!(epsilon > 0)) {
      Fail(ErrorCategory::kDomain,
           "epsilon must be positive, got " + std::to_string(epsilon));
    }
    if (!(delta >= 0 && delta <= 1)) {
      Fail(ErrorCategory::kDomain,
           "delta must lie in [0, 1], got " + std::to_string(delta));
    }
  }

  friend bool operator==(const BudgetPair&, const BudgetPair&) = default;
};

inline BudgetPair MakeBudget(double epsilon, double delta) {
  BudgetPair budget{epsilon, delta};
  budget.Validate();
  return budget;
}

}  // namespace brdp

#endif  // BRDP_BUDGET_H_
