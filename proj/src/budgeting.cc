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

#include "brdp/budgeting.h"

#include <cmath>
#include <limits>
#include <string>

namespace brdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Probe {
  double epsilon_y;
  double q;
  double objective;
  CalibratedKernel kernel;
};

}  // namespace

double BaselineQ(double epsilon_total, double epsilon_y) {
  if (!(epsilon_y > 0) || epsilon_y > epsilon_total) {
    Fail(ErrorCategory::kDomain, "baseline q needs 0 < eps_y <= eps_total");
  }
  return -std::expm1(-(epsilon_total - epsilon_y));
}

double FindQ(const CalibratedKernel& kernel, double theta,
             const BudgetPair& total, double tol) {
  total.Validate();
  if (!(tol > 0)) Fail(ErrorCategory::kDomain, "tol must be positive");
  auto feasible = [&](double q) {
    return BrdpPrivacyProfile(MakeMechanism(kernel, q, theta), total.epsilon) <=
           total.delta;
  };
  if (!feasible(0)) {
    Fail(ErrorCategory::kInfeasible,
         "kernel alone exceeds the total delta at the total epsilon");
  }
  double lo = 0;
  double hi = 1;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double FindQ(KernelKind kind, const BudgetPair& kernel_budget,
             const BudgetPair& total, double sensitivity, double theta,
             double tol) {
  if (kernel_budget.epsilon > total.epsilon) {
    Fail(ErrorCategory::kDomain, "kernel epsilon exceeds the total epsilon");
  }
  return FindQ(Calibrate(kind, kernel_budget, sensitivity), theta, total, tol);
}

double ObjectiveFromPTheta(double p_theta, double q, ObjectiveMode mode) {
  if (!(p_theta > 0)) return kInf;
  if (mode == ObjectiveMode::kReciprocal) return (1 - q) / p_theta + q;
  return 1 - q + q / p_theta;
}

double Objective(double epsilon_y, double q, const ObjectiveContext& ctx) {
  const CalibratedKernel kernel =
      Calibrate(ctx.kind, BudgetPair{epsilon_y, ctx.delta}, ctx.sensitivity);
  return ObjectiveFromPTheta(PTheta(kernel, ctx.theta), q, ctx.mode);
}

AllocationResult Allocate(const BudgetPair& total, double sensitivity,
                          double theta, const AllocationOptions& options) {
  const ObjectiveMode mode = options.mode;
  return Allocate(total, sensitivity, theta, options,
                  [theta, mode](const CalibratedKernel& kernel, double q) {
                    return ObjectiveFromPTheta(PTheta(kernel, theta), q, mode);
                  });
}

AllocationResult Allocate(const BudgetPair& total, double sensitivity,
                          double theta, const AllocationOptions& options,
                          const KernelObjective& objective) {
  total.Validate();
  MakeErrorBound(theta);
  if (!(options.tol > 0)) Fail(ErrorCategory::kDomain, "tol must be positive");
  const double delta_y = options.delta_y.value_or(total.delta);
  AllocationResult result;
  result.delta_y = delta_y;
  result.theta = theta;

  auto probe = [&](double epsilon_y) {
    Probe p{epsilon_y, 0, kInf, {}};
    try {
      p.kernel = Calibrate(options.kind, BudgetPair{epsilon_y, delta_y},
                           sensitivity);
      p.q = FindQ(p.kernel, theta, total, options.tol);
      p.objective = objective(p.kernel, p.q);
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::kInfeasible &&
          e.category() != ErrorCategory::kCalibration) {
        throw;
      }
    }
    result.trace.push_back({p.epsilon_y, p.q, p.objective});
    return p;
  };

  double lo = std::min(options.tol, 0.5 * total.epsilon);
  double hi = total.epsilon;
  for (int i = 0; i < options.max_iter && hi - lo > options.tol; ++i) {
    const double e1 = lo + (hi - lo) / 3;
    const double e2 = hi - (hi - lo) / 3;
    if (probe(e1).objective > probe(e2).objective) {
      lo = e1;
    } else {
      hi = e2;
    }
  }
  Probe best = probe(0.5 * (lo + hi));
  // eps_y = eps (the kernel alone) is always a candidate; ties favour it.
  const Probe endpoint = probe(total.epsilon);
  if (endpoint.objective <= best.objective) best = endpoint;
  if (best.objective == kInf) {
    Fail(ErrorCategory::kInfeasible, "no feasible allocation of the budget");
  }
  result.epsilon_y = best.epsilon_y;
  result.q = best.q;
  result.kernel = best.kernel;
  result.objective_value = best.objective;
  result.acceptance = AcceptanceRate(MakeMechanism(best.kernel, best.q, theta));
  return result;
}

}  // namespace brdp
