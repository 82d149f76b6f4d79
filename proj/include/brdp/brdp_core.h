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

#ifndef BRDP_BRDP_CORE_H_
#define BRDP_BRDP_CORE_H_

#include <cstdint>

#include "brdp/noise_kernels.h"

namespace brdp {

// Symmetric acceptable error [-theta, theta] around the true answer. theta may
// be +infinity.
struct ErrorBound {
  double theta = 1;

  double tau_l() const { return -theta; }
  double tau_u() const { return theta; }
};

ErrorBound MakeErrorBound(double theta);

struct BrdpMechanism {
  CalibratedKernel kernel;
  double q = 0;
  ErrorBound bound;
};

// Throws kDomain for q outside [0, 1], and for q = 1 when p_theta = 0.
BrdpMechanism MakeMechanism(const CalibratedKernel& kernel, double q,
                            double theta);

struct ShiftWeight {
  double W = 0;
  double L = 0;
};

// Pr(|N| <= theta). theta = 0 is allowed here and gives 0.
double PTheta(const CalibratedKernel& kernel, double theta);
double BarPTheta(const CalibratedKernel& kernel, double theta);

// Output density of the mechanism at y_n for true answer y.
double BrdpPdf(const BrdpMechanism& mech, double y_n, double y);
double BrdpCdf(const BrdpMechanism& mech, double y_n, double y);

struct Release {
  double value = 0;
  std::int64_t rounds = 0;
};

inline constexpr std::int64_t kDefaultRoundCap = 1'000'000;

Release Sample(const BrdpMechanism& mech, double y, Rng& rng,
               std::int64_t round_cap = kDefaultRoundCap);

double AcceptanceRate(const BrdpMechanism& mech);

ShiftWeight ShiftParams(const CalibratedKernel& kernel,
                        const ErrorBound& bound, double q);

// (1 - W) delta_Z(eps) + W delta_Z(eps - L). This is the value reported as the
// mechanism's delta.
double BrdpPrivacyProfile(const BrdpMechanism& mech, double epsilon);

// Hockey-stick divergence between the output laws for true answers 0 and
// sensitivity, by quadrature. A tightness diagnostic for BrdpPrivacyProfile.
double BrdpExactProfile(const BrdpMechanism& mech, double epsilon);

}  // namespace brdp

#endif  // BRDP_BRDP_CORE_H_
