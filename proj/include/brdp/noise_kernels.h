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

#ifndef BRDP_NOISE_KERNELS_H_
#define BRDP_NOISE_KERNELS_H_

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

#include "brdp/budget.h"

namespace brdp {

using Rng = std::mt19937_64;

enum class KernelKind { kGaussian, kLaplace };

std::string_view KernelName(KernelKind kind);
// Accepts "gaussian" / "laplace" (also "gau" / "lap"). Throws kDomain.
KernelKind ParseKernelKind(std::string_view name);

// A zero-mean symmetric noise law bound to a query sensitivity. `scale` is the
// standard deviation for the Gaussian kernel and the diversity b for Laplace.
struct CalibratedKernel {
  KernelKind kind = KernelKind::kGaussian;
  double scale = 1;
  double sensitivity = 1;

  friend bool operator==(const CalibratedKernel&,
                         const CalibratedKernel&) = default;
};

// Validating constructor; throws kDomain on non-positive scale or sensitivity.
CalibratedKernel MakeKernel(KernelKind kind, double scale, double sensitivity);

// Smallest sigma whose Gaussian privacy profile at budget.epsilon is at most
// budget.delta. Bracketed bisection on log(sigma), relative tolerance 1e-9,
// at most 200 iterations.
CalibratedKernel CalibrateGaussian(const BudgetPair& budget,
                                   double sensitivity);

// Pure epsilon-DP Laplace: b = sensitivity / epsilon.
CalibratedKernel CalibrateLaplace(double epsilon, double sensitivity);

// Tight Laplace for an (epsilon, delta) budget: the largest b whose profile at
// epsilon does not exceed delta. Equals CalibrateLaplace when delta = 0.
CalibratedKernel CalibrateLaplace(const BudgetPair& budget,
                                  double sensitivity);

// Dispatches on kind to one of the calibrations above.
CalibratedKernel Calibrate(KernelKind kind, const BudgetPair& budget,
                           double sensitivity);

double Pdf(const CalibratedKernel& kernel, double x);
double Cdf(const CalibratedKernel& kernel, double x);
// Pr(N > x), accurate in the far right tail.
double Survival(const CalibratedKernel& kernel, double x);
double SampleNoise(const CalibratedKernel& kernel, Rng& rng);

// Privacy loss log(f(t) / f(t - sensitivity)) of a release with noise t under
// the worst-case neighbouring shift. Nonincreasing in t.
double PrivacyLoss(const CalibratedKernel& kernel, double t);

// Supremum of {t : PrivacyLoss(t) > loss}; +inf / -inf when the set is the
// whole line / empty.
double LossThreshold(const CalibratedKernel& kernel, double loss);

// Upper end of the loss support (+inf for Gaussian).
double MaxLoss(const CalibratedKernel& kernel);

enum class ProfileMethod {
  kAuto,        // closed form for Gaussian, quadrature for Laplace
  kQuadrature,  // adaptive Gauss-Kronrod on the hockey-stick integrand
  kClosedForm,  // F(t*) - e^eps F(t* - sensitivity)
};

// Tight single-use delta(epsilon) of the kernel mechanism. Valid for any real
// epsilon, including negative values.
double PrivacyProfile(const CalibratedKernel& kernel, double epsilon,
                      ProfileMethod method = ProfileMethod::kAuto);

// Inverse of the loss distribution: Pr(Z <= z) when the release is drawn from
// the unshifted kernel.
double LossCdf(const CalibratedKernel& kernel, double z);

}  // namespace brdp

#endif  // BRDP_NOISE_KERNELS_H_
