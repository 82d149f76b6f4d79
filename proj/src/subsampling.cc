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

#include "brdp/subsampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace brdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckRate(double p) {
  if (!(p > 0 && p <= 1)) {
    Fail(ErrorCategory::kDomain, "sampling rate p must lie in (0, 1]");
  }
}

void RequireGaussian(KernelKind kind) {
  if (kind != KernelKind::kGaussian) {
    Fail(ErrorCategory::kUnsupportedKernel,
         "the combined acceptance model needs a Gaussian kernel");
  }
}

}  // namespace

std::string_view QueryName(QueryKind kind) {
  switch (kind) {
    case QueryKind::kSum:
      return "sum";
    case QueryKind::kAverage:
      return "average";
    case QueryKind::kCount:
      return "count";
  }
  return "sum";
}

QueryKind ParseQueryKind(std::string_view name) {
  if (name == "sum") return QueryKind::kSum;
  if (name == "average" || name == "avg" || name == "mean") {
    return QueryKind::kAverage;
  }
  if (name == "count") return QueryKind::kCount;
  Fail(ErrorCategory::kDomain, "unknown query kind '" + std::string(name) + "'");
}

BudgetPair Amplify(const BudgetPair& inner, double p) {
  inner.Validate();
  CheckRate(p);
  if (p == 1) return inner;
  return BudgetPair{std::log1p(p * std::expm1(inner.epsilon)), p * inner.delta};
}

BudgetPair Deamplify(const BudgetPair& total, double p) {
  total.Validate();
  CheckRate(p);
  if (p == 1) return total;
  if (total.delta / p > 1) {
    Fail(ErrorCategory::kInfeasible, "delta / p exceeds 1");
  }
  return BudgetPair{std::log1p(std::expm1(total.epsilon) / p),
                    total.delta / p};
}

double SamplingSigma(QueryKind kind, const PopulationModel& pop, double p) {
  CheckRate(p);
  if (pop.size < 1 || !(pop.sigma_x > 0) || !(pop.p_c >= 0 && pop.p_c <= 1)) {
    Fail(ErrorCategory::kDomain, "invalid population model");
  }
  const double n = static_cast<double>(pop.size);
  const double keep = (1 - p) / p;
  switch (kind) {
    case QueryKind::kSum:
      return pop.sigma_x * std::sqrt(n * keep);
    case QueryKind::kAverage:
      return pop.sigma_x * std::sqrt(keep / n);
    case QueryKind::kCount:
      return std::sqrt(n * keep * pop.p_c * (1 - pop.p_c));
  }
  return 0;
}

double CombinedPTheta(const CalibratedKernel& kernel, double theta,
                      double sigma_e) {
  RequireGaussian(kernel.kind);
  if (sigma_e == kInf) return 0.0;
  const double sigma = std::hypot(kernel.scale, sigma_e);
  return std::erf(theta / (sigma * std::sqrt(2.0)));
}

double CombinedAcceptance(const CalibratedKernel& kernel, double theta,
                          double q, double sigma_e) {
  const double p = CombinedPTheta(kernel, theta, sigma_e);
  if (p == 0) return 0.0;
  return p / ((1 - q) + p * q);
}

double CombinedObjective(double epsilon_y, double q, double p,
                         const CombinedContext& ctx) {
  RequireGaussian(ctx.kind);
  const CalibratedKernel kernel = CalibrateGaussian(
      BudgetPair{epsilon_y, ctx.delta}, ctx.sensitivity);
  const double sigma_e = SamplingSigma(ctx.query, ctx.pop, p);
  return ObjectiveFromPTheta(CombinedPTheta(kernel, ctx.theta, sigma_e), q,
                             ctx.mode);
}

SubsampledResult PlanAtRate(const BudgetPair& total, double sensitivity,
                            double theta, QueryKind kind,
                            const PopulationModel& pop, double p,
                            const SubsamplingOptions& options) {
  SubsampledResult result;
  SubsampledPlan& plan = result.plan;
  plan.p = p;
  plan.inner_budget = Deamplify(total, p);
  if (!(plan.inner_budget.delta < 1)) {
    Fail(ErrorCategory::kInfeasible, "inner delta reaches 1");
  }
  plan.sigma_e = SamplingSigma(kind, pop, p);
  plan.sensitivity = options.scaling == SensitivityScaling::kInverseProbability
                         ? sensitivity / p
                         : sensitivity;
  if (kind == QueryKind::kCount &&
      static_cast<double>(pop.size) * p * pop.p_c * (1 - pop.p_c) < 10) {
    plan.warnings.push_back(
        "count normal approximation is weak: |X_s| p_c (1 - p_c) < 10");
  }
  AllocationOptions alloc;
  alloc.kind = KernelKind::kGaussian;
  alloc.tol = options.allocation_tol;
  alloc.mode = options.mode;
  alloc.max_iter = options.max_iter;
  const double sigma_e = plan.sigma_e;
  const ObjectiveMode mode = options.mode;
  result.allocation =
      Allocate(plan.inner_budget, plan.sensitivity, theta, alloc,
               [=](const CalibratedKernel& kernel, double q) {
                 return ObjectiveFromPTheta(
                     CombinedPTheta(kernel, theta, sigma_e), q, mode);
               });
  result.acceptance = CombinedAcceptance(result.allocation.kernel, theta,
                                         result.allocation.q, sigma_e);
  return result;
}

SubsampledResult FindP(const BudgetPair& total, double sensitivity,
                       double theta, QueryKind kind, const PopulationModel& pop,
                       const SubsamplingOptions& options) {
  total.Validate();
  if (!(options.tol > 0)) Fail(ErrorCategory::kDomain, "tol must be positive");
  auto evaluate = [&](double p, SubsampledResult* out) {
    try {
      SubsampledResult r =
          PlanAtRate(total, sensitivity, theta, kind, pop, p, options);
      const double value = r.allocation.objective_value;
      if (out) *out = std::move(r);
      return value;
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::kInfeasible) throw;
      return kInf;
    }
  };

  double lo = std::min(0.5, std::max(options.tol, 2 * total.delta));
  double hi = 1;
  for (int i = 0; i < options.max_iter && hi - lo > options.tol; ++i) {
    const double p1 = lo + (hi - lo) / 3;
    const double p2 = hi - (hi - lo) / 3;
    if (evaluate(p1, nullptr) > evaluate(p2, nullptr)) {
      lo = p1;
    } else {
      hi = p2;
    }
  }
  SubsampledResult best;
  double best_value = evaluate(0.5 * (lo + hi), &best);
  // p = 1 (no subsampling) is always a candidate; ties favour it.
  SubsampledResult full;
  const double full_value = evaluate(1.0, &full);
  if (full_value <= best_value) {
    best = std::move(full);
    best_value = full_value;
  }
  if (best_value == kInf) {
    Fail(ErrorCategory::kInfeasible, "no feasible sampling rate");
  }
  return best;
}

double MonteCarloAcceptance(const BrdpMechanism& mech, double sigma_e,
                            int draws, std::uint64_t seed) {
  if (draws < 1) Fail(ErrorCategory::kDomain, "draws must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> sampling(0.0, 1.0);
  int accepted = 0;
  for (int i = 0; i < draws; ++i) {
    const double error = sigma_e > 0 ? sigma_e * sampling(rng) : 0.0;
    const Release r = Sample(mech, error, rng);
    if (std::abs(r.value) <= mech.bound.theta) ++accepted;
  }
  return static_cast<double>(accepted) / draws;
}

double EndToEndAcceptance(const BrdpMechanism& mech, double sigma_e) {
  const double theta = mech.bound.theta;
  auto window = [&](double e) {
    return BrdpCdf(mech, theta, e) - BrdpCdf(mech, -theta, e);
  };
  if (sigma_e == 0) return window(0);
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto integrand = [&](double u) {
    return window(sigma_e * u) * std::exp(-0.5 * u * u) / std::sqrt(2 * M_PI);
  };
  double total = 0;
  // The window has kinks where the shifted bound meets +-theta.
  const double kink = 2 * theta / sigma_e;
  const double edges[] = {-kInf, -kink, 0, kink, kInf};
  for (int i = 0; i < 4; ++i) {
    total += Quadrature::integrate(integrand, edges[i], edges[i + 1], 10, 1e-12);
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace brdp
