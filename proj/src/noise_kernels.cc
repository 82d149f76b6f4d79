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

#include "brdp/noise_kernels.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace brdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.41421356237309504880;

// Standard normal CDF via erfc so that both tails keep relative accuracy.
double StdNormalCdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double GaussianProfileClosedForm(const CalibratedKernel& k, double epsilon) {
  const double ratio = k.sensitivity / k.scale;
  const double a = 0.5 * ratio - epsilon / ratio;
  const double b = -0.5 * ratio - epsilon / ratio;
  const double lhs = StdNormalCdf(a);
  const double tail = StdNormalCdf(b);
  const double rhs = tail > 0 ? std::exp(epsilon + std::log(tail)) : 0.0;
  return std::clamp(lhs - rhs, 0.0, 1.0);
}

double LaplaceProfileClosedForm(const CalibratedKernel& k, double epsilon) {
  const double max_loss = k.sensitivity / k.scale;
  if (epsilon >= max_loss) return 0.0;
  if (epsilon < -max_loss) return -std::expm1(epsilon);
  return -std::expm1(0.5 * (epsilon - max_loss));
}

// Integrates f(t) - e^eps f(t - D) over (-inf, t*], the region where the loss
// exceeds epsilon. The integrand is written as -f(t) * expm1(eps - loss(t)),
// which neither overflows nor cancels.
double ProfileByQuadrature(const CalibratedKernel& k, double epsilon) {
  const double upper = LossThreshold(k, epsilon);
  if (upper == -kInf) return 0.0;

  // Split at the kernel centres and a few scales out, so that a long finite
  // piece never hides the bulk of the density from the quadrature rule.
  std::vector<double> edges = {-kInf};
  for (double edge : {-10 * k.scale, 0.0, k.sensitivity,
                      k.sensitivity + 10 * k.scale}) {
    if (edge < upper) edges.push_back(edge);
  }
  edges.push_back(upper);

  auto integrand = [&](double t) {
    const double density = Pdf(k, t);
    if (density == 0) return 0.0;
    return -density * std::expm1(epsilon - PrivacyLoss(k, t));
  };

  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0;
  double error_total = 0;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    double error = 0;
    total += Quadrature::integrate(integrand, edges[i], edges[i + 1], 10,
                                   1e-13, &error);
    error_total += error;
  }
  if (!(error_total <= 1e-10 + 1e-9 * std::abs(total))) {
    Fail(ErrorCategory::kAccuracy,
         "privacy profile quadrature missed tolerance (error estimate " +
             std::to_string(error_total) + ")");
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace

std::string_view KernelName(KernelKind kind) {
  return kind == KernelKind::kGaussian ? "gaussian" : "laplace";
}

KernelKind ParseKernelKind(std::string_view name) {
  if (name == "gaussian" || name == "gau") return KernelKind::kGaussian;
  if (name == "laplace" || name == "lap" || name == "laplacian") {
    return KernelKind::kLaplace;
  }
  Fail(ErrorCategory::kDomain, "unknown kernel '" + std::string(name) + "'");
}

CalibratedKernel MakeKernel(KernelKind kind, double scale, double sensitivity) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    Fail(ErrorCategory::kDomain, "kernel scale must be positive and finite");
  }
  if (!(sensitivity > 0) || !std::isfinite(sensitivity)) {
    Fail(ErrorCategory::kDomain, "sensitivity must be positive and finite");
  }
  return CalibratedKernel{kind, scale, sensitivity};
}

CalibratedKernel CalibrateGaussian(const BudgetPair& budget,
                                   double sensitivity) {
  budget.Validate();
  if (!(budget.delta > 0 && budget.delta < 1)) {
    Fail(ErrorCategory::kDomain, "Gaussian calibration needs delta in (0, 1)");
  }
  if (!(sensitivity > 0)) {
    Fail(ErrorCategory::kDomain, "sensitivity must be positive");
  }
  // The profile depends on sigma / sensitivity only; search the unit case.
  auto profile = [&](double unit_sigma) {
    return GaussianProfileClosedForm(
        CalibratedKernel{KernelKind::kGaussian, unit_sigma, 1.0},
        budget.epsilon);
  };

  double lo = 1;
  double hi = 1;
  while (profile(lo) <= budget.delta) {
    lo *= 0.5;
    if (lo < 1e-12) return MakeKernel(KernelKind::kGaussian, lo * sensitivity,
                                      sensitivity);
  }
  while (profile(hi) > budget.delta) {
    hi *= 2;
    if (hi > 1e12) {
      Fail(ErrorCategory::kCalibration,
           "no Gaussian scale below 1e12 meets the budget");
    }
  }
  // Invariant: profile(lo) > delta >= profile(hi).
  int iterations = 0;
  while (hi / lo - 1 > 1e-9) {
    if (++iterations > 200) {
      Fail(ErrorCategory::kCalibration,
           "Gaussian calibration did not converge in 200 iterations");
    }
    const double mid = std::sqrt(lo * hi);
    if (profile(mid) <= budget.delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return MakeKernel(KernelKind::kGaussian, hi * sensitivity, sensitivity);
}

CalibratedKernel CalibrateLaplace(double epsilon, double sensitivity) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    Fail(ErrorCategory::kDomain, "Laplace calibration needs epsilon > 0");
  }
  return MakeKernel(KernelKind::kLaplace, sensitivity / epsilon, sensitivity);
}

CalibratedKernel CalibrateLaplace(const BudgetPair& budget,
                                  double sensitivity) {
  budget.Validate();
  if (!(budget.delta < 1)) {
    Fail(ErrorCategory::kDomain, "Laplace calibration needs delta < 1");
  }
  if (budget.delta == 0) return CalibrateLaplace(budget.epsilon, sensitivity);
  // Profile at eps is 1 - exp((eps - D/b) / 2); solve for D/b.
  const double max_loss = budget.epsilon - 2 * std::log1p(-budget.delta);
  CalibratedKernel kernel =
      MakeKernel(KernelKind::kLaplace, sensitivity / max_loss, sensitivity);
  // Rounding can leave the profile a few ulps above delta; widen b until not.
  for (int i = 0; i < 64 && LaplaceProfileClosedForm(kernel, budget.epsilon) >
                                budget.delta;
       ++i) {
    kernel.scale = std::nextafter(kernel.scale, kInf);
  }
  return kernel;
}

CalibratedKernel Calibrate(KernelKind kind, const BudgetPair& budget,
                           double sensitivity) {
  return kind == KernelKind::kGaussian ? CalibrateGaussian(budget, sensitivity)
                                       : CalibrateLaplace(budget, sensitivity);
}

double Pdf(const CalibratedKernel& k, double x) {
  if (k.kind == KernelKind::kGaussian) {
    const double u = x / k.scale;
    return std::exp(-0.5 * u * u) / (k.scale * 2.50662827463100050242);
  }
  return 0.5 / k.scale * std::exp(-std::abs(x) / k.scale);
}

double Cdf(const CalibratedKernel& k, double x) {
  if (k.kind == KernelKind::kGaussian) return StdNormalCdf(x / k.scale);
  if (x < 0) return 0.5 * std::exp(x / k.scale);
  return 1 - 0.5 * std::exp(-x / k.scale);
}

double Survival(const CalibratedKernel& k, double x) {
  if (k.kind == KernelKind::kGaussian) return StdNormalCdf(-x / k.scale);
  if (x > 0) return 0.5 * std::exp(-x / k.scale);
  return 1 - 0.5 * std::exp(x / k.scale);
}

double SampleNoise(const CalibratedKernel& k, Rng& rng) {
  if (k.kind == KernelKind::kGaussian) {
    return std::normal_distribution<double>(0.0, k.scale)(rng);
  }
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  double u = uniform(rng);
  while (u == -0.5) u = uniform(rng);
  const double magnitude = -k.scale * std::log1p(-2 * std::abs(u));
  return u < 0 ? -magnitude : magnitude;
}

double PrivacyLoss(const CalibratedKernel& k, double t) {
  const double d = k.sensitivity;
  if (k.kind == KernelKind::kGaussian) {
    return d * (d - 2 * t) / (2 * k.scale * k.scale);
  }
  // Piecewise, so the flat tails are exact rather than a difference of
  // large absolute values.
  if (t <= 0) return d / k.scale;
  if (t >= d) return -d / k.scale;
  return (d - 2 * t) / k.scale;
}

double LossThreshold(const CalibratedKernel& k, double loss) {
  const double d = k.sensitivity;
  if (std::isinf(loss)) return loss > 0 ? -kInf : kInf;
  if (k.kind == KernelKind::kGaussian) {
    return 0.5 * d - k.scale * k.scale * loss / d;
  }
  const double max_loss = d / k.scale;
  if (loss >= max_loss) return -kInf;
  if (loss < -max_loss) return kInf;
  return 0.5 * (d - loss * k.scale);
}

double MaxLoss(const CalibratedKernel& k) {
  return k.kind == KernelKind::kGaussian ? kInf : k.sensitivity / k.scale;
}

double LossCdf(const CalibratedKernel& k, double z) {
  // {Z <= z} = {noise >= LossThreshold(z)}; the noise law has no atoms.
  const double t = LossThreshold(k, z);
  if (t == kInf) return 0.0;
  if (t == -kInf) return 1.0;
  return Survival(k, t);
}

double PrivacyProfile(const CalibratedKernel& kernel, double epsilon,
                      ProfileMethod method) {
  if (std::isnan(epsilon)) Fail(ErrorCategory::kDomain, "epsilon is NaN");
  if (epsilon == kInf) return 0.0;
  if (epsilon == -kInf) return 1.0;
  if (method == ProfileMethod::kAuto) {
    method = kernel.kind == KernelKind::kGaussian ? ProfileMethod::kClosedForm
                                                  : ProfileMethod::kQuadrature;
  }
  if (method == ProfileMethod::kQuadrature) {
    return ProfileByQuadrature(kernel, epsilon);
  }
  return kernel.kind == KernelKind::kGaussian
             ? GaussianProfileClosedForm(kernel, epsilon)
             : LaplaceProfileClosedForm(kernel, epsilon);
}

}  // namespace brdp
