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

#ifndef BRDP_SUBSAMPLING_H_
#define BRDP_SUBSAMPLING_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "brdp/budgeting.h"

namespace brdp {

struct PopulationModel {
  std::int64_t size = 1;
  double mu = 0;
  double sigma_x = 1;
  double p_c = 0.5;  // Pr(record satisfies the count predicate)
};

enum class QueryKind { kSum, kAverage, kCount };

std::string_view QueryName(QueryKind kind);
QueryKind ParseQueryKind(std::string_view name);

// Budget seen from outside when the mechanism runs on a rate-p subsample.
BudgetPair Amplify(const BudgetPair& inner, double p);

// Inner budget whose amplification at rate p equals `total`.
BudgetPair Deamplify(const BudgetPair& total, double p);

// Standard deviation of the subsampling error of the scaled estimator.
double SamplingSigma(QueryKind kind, const PopulationModel& pop, double p);

// Pr(|E + N| <= theta) for Gaussian N and E ~ N(0, sigma_e^2).
double CombinedPTheta(const CalibratedKernel& kernel, double theta,
                      double sigma_e);

// Acceptance rate with the combined Gaussian in place of the kernel.
double CombinedAcceptance(const CalibratedKernel& kernel, double theta,
                          double q, double sigma_e);

struct CombinedContext {
  KernelKind kind = KernelKind::kGaussian;
  double delta = 1e-5;
  double sensitivity = 1;  // sensitivity the kernel is calibrated against
  double theta = 1;
  QueryKind query = QueryKind::kSum;
  PopulationModel pop;
  ObjectiveMode mode = ObjectiveMode::kReciprocal;
};

// Throws kUnsupportedKernel for non-Gaussian kernels.
double CombinedObjective(double epsilon_y, double q, double p,
                         const CombinedContext& ctx);

enum class SensitivityScaling {
  kInverseProbability,  // kernel calibrated at sensitivity / p
  kNone,
};

struct SubsampledPlan {
  double p = 1;
  BudgetPair inner_budget;
  double sigma_e = 0;
  double sensitivity = 1;  // kernel sensitivity after scaling
  std::vector<std::string> warnings;
};

struct SubsamplingOptions {
  double tol = 1e-3;             // bracket width for p
  double allocation_tol = 1e-4;  // forwarded to Allocate
  ObjectiveMode mode = ObjectiveMode::kReciprocal;
  SensitivityScaling scaling = SensitivityScaling::kInverseProbability;
  int max_iter = 300;
};

struct SubsampledResult {
  SubsampledPlan plan;
  AllocationResult allocation;
  double acceptance = 0;  // combined (end-to-end Gaussian) acceptance
};

// Plan for a fixed p: deamplify, sampling sigma, combined-objective allocation.
SubsampledResult PlanAtRate(const BudgetPair& total, double sensitivity,
                            double theta, QueryKind kind,
                            const PopulationModel& pop, double p,
                            const SubsamplingOptions& options = {});

// Ternary search on p in (0, 1], then compared with p = 1.
SubsampledResult FindP(const BudgetPair& total, double sensitivity,
                       double theta, QueryKind kind, const PopulationModel& pop,
                       const SubsamplingOptions& options = {});

// Monte-Carlo Pr(|E + Y_n - y| <= theta), where the recycler checks only the
// kernel noise. Works for any kernel.
double MonteCarloAcceptance(const BrdpMechanism& mech, double sigma_e,
                            int draws = 10000, std::uint64_t seed = 0x5eed);

// The same quantity by quadrature over E.
double EndToEndAcceptance(const BrdpMechanism& mech, double sigma_e);

}  // namespace brdp

#endif  // BRDP_SUBSAMPLING_H_
