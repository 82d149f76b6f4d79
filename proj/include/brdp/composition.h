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

#ifndef BRDP_COMPOSITION_H_
#define BRDP_COMPOSITION_H_

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "brdp/brdp_core.h"
#include "brdp/pld.h"

namespace brdp {

// delta_Z^T(eps) for T uses of one kernel. Gaussian uses the normal form of
// the composed loss; Laplace self-convolves a PLD grid once at construction.
// Evaluations are memoised.
class ComposedKernelProfile {
 public:
  ComposedKernelProfile(const CalibratedKernel& kernel, int T,
                        double step = kDefaultPldStep);

  double operator()(double epsilon) const;
  int T() const { return T_; }

 private:
  CalibratedKernel kernel_;
  int T_;
  std::shared_ptr<const GridProfile> grid_;
  mutable std::map<double, double> memo_;
};

double KernelProfileT(const CalibratedKernel& kernel, int T, double epsilon);

struct CompositionQuery {
  BrdpMechanism mechanism;
  int T = 1;
  double target_epsilon = 0;
};

// log of C(T,k) (1-W)^k W^(T-k) for k = 0..T.
std::vector<double> BinomialLogWeights(int T, double W);

// Sum over k = 0..T of C(T,k) (1-W)^k W^(T-k) delta_Z^T(eps - (T-k) L).
double BrdpProfileT(const CompositionQuery& query);
double BrdpProfileT(const BrdpMechanism& mech, double epsilon,
                    const ComposedKernelProfile& kernel_profile);

// Grid oracle: kernel PLD mixed with the recycler shift, self-convolved T
// times. Limited to T <= 8.
double BruteForceT(const BrdpMechanism& mech, int T, double epsilon,
                   double step = kDefaultPldStep);

// PLD grid of one BR-DP use under the shift model (kernel grid mixed with the
// recycler shift).
PldGrid BrdpPldGrid(const BrdpMechanism& mech, double step = kDefaultPldStep);

// delta(eps) after T uses of the mechanism run on a Poisson subsample at
// rate p; the worse of the two neighbouring directions.
class SubsampledProfileT {
 public:
  SubsampledProfileT(const BrdpMechanism& inner, double p, int T,
                     double step = kDefaultPldStep);

  double operator()(double epsilon) const;

 private:
  std::shared_ptr<const GridProfile> remove_;
  std::shared_ptr<const GridProfile> add_;
};

BudgetPair BasicComposition(const BudgetPair& budget, int T);

double AdvancedComposition(const BudgetPair& budget, int T);

// Smallest eps in [lo, hi] with profile(eps) <= target (bisection to tol). The
// upper edge doubles up to 2^20 before a kBracket error.
double EpsilonAtDelta(const std::function<double(double)>& profile,
                      double target_delta, double lo = 0, double hi = 16,
                      double tol = 1e-4);

}  // namespace brdp

#endif  // BRDP_COMPOSITION_H_
