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

#include "brdp/composition.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace brdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double StdNormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void CheckT(int T) {
  if (T < 1) Fail(ErrorCategory::kDomain, "composition count T must be >= 1");
}

}  // namespace

ComposedKernelProfile::ComposedKernelProfile(const CalibratedKernel& kernel,
                                             int T, double step)
    : kernel_(kernel), T_(T) {
  CheckT(T);
  if (kernel.kind == KernelKind::kLaplace) {
    grid_ = std::make_shared<const GridProfile>(
        SelfConvolve(DefaultPldGrid(kernel, step), T));
  }
}

double ComposedKernelProfile::operator()(double epsilon) const {
  if (std::isnan(epsilon)) Fail(ErrorCategory::kDomain, "epsilon is NaN");
  if (epsilon == kInf) return 0.0;
  if (epsilon == -kInf) return 1.0;
  if (auto it = memo_.find(epsilon); it != memo_.end()) return it->second;
  double delta;
  if (grid_) {
    delta = (*grid_)(epsilon);
  } else {
    // Composed Gaussian loss is N(T mu, 2 T mu), mu = D^2 / (2 sigma^2).
    const double ratio = kernel_.sensitivity / kernel_.scale;
    const double mean = T_ * 0.5 * ratio * ratio;
    const double sd = std::sqrt(2 * mean);
    const double lhs = StdNormalCdf((mean - epsilon) / sd);
    const double tail = StdNormalCdf((-mean - epsilon) / sd);
    const double rhs = tail > 0 ? std::exp(epsilon + std::log(tail)) : 0.0;
    delta = std::clamp(lhs - rhs, 0.0, 1.0);
  }
  memo_.emplace(epsilon, delta);
  return delta;
}

double KernelProfileT(const CalibratedKernel& kernel, int T, double epsilon) {
  return ComposedKernelProfile(kernel, T)(epsilon);
}

std::vector<double> BinomialLogWeights(int T, double W) {
  CheckT(T);
  if (!(W >= 0 && W <= 1)) Fail(ErrorCategory::kDomain, "W must lie in [0,1]");
  std::vector<double> weights(T + 1);
  const double log_keep = std::log1p(-W);
  const double log_shift = std::log(W);
  const double log_t = std::lgamma(T + 1.0);
  for (int k = 0; k <= T; ++k) {
    const int shifted = T - k;
    double w = log_t - std::lgamma(k + 1.0) - std::lgamma(shifted + 1.0);
    if (k > 0) w += k * log_keep;
    if (shifted > 0) w += shifted * log_shift;
    weights[k] = w;
  }
  return weights;
}

double BrdpProfileT(const BrdpMechanism& mech, double epsilon,
                    const ComposedKernelProfile& kernel_profile) {
  const ShiftWeight shift = ShiftParams(mech.kernel, mech.bound, mech.q);
  if (shift.L == 0 || shift.W == 0) return kernel_profile(epsilon);
  const int T = kernel_profile.T();
  const std::vector<double> log_weights = BinomialLogWeights(T, shift.W);
  double delta = 0;
  for (int k = 0; k <= T; ++k) {
    const double weight = std::exp(log_weights[k]);
    if (weight == 0) continue;
    const int shifted = T - k;
    double term;
    if (shifted == 0) {
      term = kernel_profile(epsilon);
    } else if (shift.L == kInf) {
      term = 1.0;
    } else {
      term = kernel_profile(epsilon - shifted * shift.L);
    }
    delta += weight * term;
  }
  return std::clamp(delta, 0.0, 1.0);
}

double BrdpProfileT(const CompositionQuery& query) {
  const ComposedKernelProfile kernel_profile(query.mechanism.kernel, query.T);
  return BrdpProfileT(query.mechanism, query.target_epsilon, kernel_profile);
}

PldGrid BrdpPldGrid(const BrdpMechanism& mech, double step) {
  const ShiftWeight shift = ShiftParams(mech.kernel, mech.bound, mech.q);
  return MixWithShift(DefaultPldGrid(mech.kernel, step), shift.W, shift.L);
}

double BruteForceT(const BrdpMechanism& mech, int T, double epsilon,
                   double step) {
  CheckT(T);
  if (T > 8) Fail(ErrorCategory::kDomain, "brute force is limited to T <= 8");
  return DeltaFromGrid(SelfConvolve(BrdpPldGrid(mech, step), T), epsilon);
}

SubsampledProfileT::SubsampledProfileT(const BrdpMechanism& inner, double p,
                                       int T, double step) {
  CheckT(T);
  const PldGrid base = BrdpPldGrid(inner, step);
  remove_ = std::make_shared<const GridProfile>(
      SelfConvolve(SubsampledGrid(base, p, true), T));
  add_ = std::make_shared<const GridProfile>(
      SelfConvolve(SubsampledGrid(base, p, false), T));
}

double SubsampledProfileT::operator()(double epsilon) const {
  return std::max((*remove_)(epsilon), (*add_)(epsilon));
}

BudgetPair BasicComposition(const BudgetPair& budget, int T) {
  budget.Validate();
  CheckT(T);
  return BudgetPair{T * budget.epsilon, std::min(1.0, T * budget.delta)};
}

double AdvancedComposition(const BudgetPair& budget, int T) {
  budget.Validate();
  CheckT(T);
  if (!(budget.delta > 0 && budget.delta < 1)) {
    Fail(ErrorCategory::kDomain, "advanced composition needs delta in (0, 1)");
  }
  const double eps = budget.epsilon;
  return T * eps * std::expm1(eps) +
         std::sqrt(2.0 * T * std::log(1 / budget.delta)) * eps;
}

double EpsilonAtDelta(const std::function<double(double)>& profile,
                      double target_delta, double lo, double hi, double tol) {
  if (!(target_delta > 0 && target_delta < 1)) {
    Fail(ErrorCategory::kDomain, "target delta must lie in (0, 1)");
  }
  if (!(lo < hi) || !(tol > 0)) {
    Fail(ErrorCategory::kDomain, "EpsilonAtDelta needs lo < hi and tol > 0");
  }
  if (profile(lo) <= target_delta) return lo;
  while (profile(hi) > target_delta) {
    lo = hi;
    hi *= 2;
    if (hi > 1048576) {
      Fail(ErrorCategory::kBracket,
           "target delta not reached for epsilon up to 2^20");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (profile(mid) <= target_delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace brdp
