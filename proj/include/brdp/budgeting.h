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

#ifndef BRDP_BUDGETING_H_
#define BRDP_BUDGETING_H_

#include <functional>
#include <optional>
#include <vector>

#include "brdp/brdp_core.h"

namespace brdp {

// 1 - exp(-(eps_total - eps_y)).
double BaselineQ(double epsilon_total, double epsilon_y);

// Largest q (within tol) such that the mechanism's delta at total.epsilon is
// at most total.delta. Throws kInfeasible when even q = 0 fails.
double FindQ(const CalibratedKernel& kernel, double theta,
             const BudgetPair& total, double tol = 1e-4);

double FindQ(KernelKind kind, const BudgetPair& kernel_budget,
             const BudgetPair& total, double sensitivity, double theta,
             double tol = 1e-4);

enum class ObjectiveMode {
  kReciprocal,  // (1 - q) / p + q, the reciprocal of the acceptance rate
  kLiteral,     // 1 - q + q / p
};

// Objective from p_theta and q; +infinity when p_theta is 0.
double ObjectiveFromPTheta(double p_theta, double q, ObjectiveMode mode);

struct ObjectiveContext {
  KernelKind kind = KernelKind::kGaussian;
  double delta = 1e-5;
  double sensitivity = 1;
  double theta = 1;
  ObjectiveMode mode = ObjectiveMode::kReciprocal;
};

// Calibrates the kernel at (eps_y, ctx.delta) and evaluates the objective.
double Objective(double epsilon_y, double q, const ObjectiveContext& ctx);

struct AllocationOptions {
  KernelKind kind = KernelKind::kGaussian;
  double tol = 1e-4;
  std::optional<double> delta_y;  // defaults to the total delta
  ObjectiveMode mode = ObjectiveMode::kReciprocal;
  int max_iter = 300;
};

struct AllocationProbe {
  double epsilon_y = 0;
  double q = 0;
  double objective = 0;
};

struct AllocationResult {
  double epsilon_y = 0;
  double delta_y = 0;
  double q = 0;
  double objective_value = 0;
  double acceptance = 0;
  double theta = 1;
  CalibratedKernel kernel;
  std::vector<AllocationProbe> trace;

  BrdpMechanism mechanism() const { return MakeMechanism(kernel, q, theta); }
};

// Objective as a function of the calibrated kernel and q; lower is better.
using KernelObjective =
    std::function<double(const CalibratedKernel& kernel, double q)>;

AllocationResult Allocate(const BudgetPair& total, double sensitivity,
                          double theta, const AllocationOptions& options = {});

AllocationResult Allocate(const BudgetPair& total, double sensitivity,
                          double theta, const AllocationOptions& options,
                          const KernelObjective& objective);

}  // namespace brdp

#endif  // BRDP_BUDGETING_H_
