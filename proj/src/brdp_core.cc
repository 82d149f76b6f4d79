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

#include "brdp/brdp_core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace brdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - bar_p * q, written so that q = 1 keeps full precision.
double Normaliser(double p_theta, double q) {
  return (1 - q) + p_theta * q;
}

double OutsideFactor(double q) { return 1 - q; }

}  // namespace

ErrorBound MakeErrorBound(double theta) {
  if (!(theta > 0)) {
    Fail(ErrorCategory::kDomain, "error bound theta must be positive");
  }
  return ErrorBound{theta};
}

BrdpMechanism MakeMechanism(const CalibratedKernel& kernel, double q,
                            double theta) {
  if (!(q >= 0 && q <= 1)) {
    Fail(ErrorCategory::kDomain, "recycling rate q must lie in [0, 1]");
  }
  BrdpMechanism mech{kernel, q, MakeErrorBound(theta)};
  if (q == 1 && PTheta(kernel, theta) == 0) {
    Fail(ErrorCategory::kDomain,
         "q = 1 with p_theta = 0 would never release an answer");
  }
  return mech;
}

double PTheta(const CalibratedKernel& kernel, double theta) {
  if (!(theta >= 0)) Fail(ErrorCategory::kDomain, "theta must be >= 0");
  if (theta == kInf) return 1.0;
  // Symmetric law: Pr(|N| <= theta) = 1 - 2 Pr(N > theta).
  return 1 - 2 * Survival(kernel, theta);
}

double BarPTheta(const CalibratedKernel& kernel, double theta) {
  if (!(theta >= 0)) Fail(ErrorCategory::kDomain, "theta must be >= 0");
  if (theta == kInf) return 0.0;
  return 2 * Survival(kernel, theta);
}

double BrdpPdf(const BrdpMechanism& mech, double y_n, double y) {
  const double x = y_n - y;
  const double base = Pdf(mech.kernel, x);
  const double norm = Normaliser(PTheta(mech.kernel, mech.bound.theta), mech.q);
  if (std::abs(x) <= mech.bound.theta) return base / norm;
  return base * OutsideFactor(mech.q) / norm;
}

double BrdpCdf(const BrdpMechanism& mech, double y_n, double y) {
  const double x = y_n - y;
  const double theta = mech.bound.theta;
  const CalibratedKernel& k = mech.kernel;
  const double p = PTheta(k, theta);
  const double norm = Normaliser(p, mech.q);
  const double out = OutsideFactor(mech.q);
  if (theta == kInf) return Cdf(k, x);
  const double left = Cdf(k, -theta);
  double mass;
  if (x < -theta) {
    mass = out * Cdf(k, x);
  } else if (x <= theta) {
    mass = out * left + (Cdf(k, x) - left);
  } else {
    mass = out * left + p + out * (Survival(k, theta) - Survival(k, x));
  }
  return std::clamp(mass / norm, 0.0, 1.0);
}

Release Sample(const BrdpMechanism& mech, double y, Rng& rng,
               std::int64_t round_cap) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Release release;
  while (release.rounds < round_cap) {
    ++release.rounds;
    const double n = SampleNoise(mech.kernel, rng);
    if (std::abs(n) <= mech.bound.theta || mech.q == 0) {
      release.value = y + n;
      return release;
    }
    if (mech.q < 1 && coin(rng) >= mech.q) {
      release.value = y + n;
      return release;
    }
  }
  Fail(ErrorCategory::kNonTermination,
       "sampler exceeded " + std::to_string(round_cap) + " rounds");
}

double AcceptanceRate(const BrdpMechanism& mech) {
  const double p = PTheta(mech.kernel, mech.bound.theta);
  return p / Normaliser(p, mech.q);
}

ShiftWeight ShiftParams(const CalibratedKernel& kernel,
                        const ErrorBound& bound, double q) {
  if (!(q >= 0 && q <= 1)) {
    Fail(ErrorCategory::kDomain, "recycling rate q must lie in [0, 1]");
  }
  ShiftWeight shift;
  shift.L = q == 1 ? kInf : -std::log1p(-q);
  if (bound.theta == kInf) return shift;
  const double d = kernel.sensitivity;
  const double lo = bound.tau_l();
  const double hi = bound.tau_u();
  const double first = Cdf(kernel, std::min(lo + d, hi)) - Cdf(kernel, lo);
  // Upper-tail differences via the survival function keep small values exact.
  const double second =
      Survival(kernel, std::max(hi, lo + d)) - Survival(kernel, hi + d);
  shift.W = std::clamp(std::max(first, second), 0.0, 1.0);
  return shift;
}

double BrdpPrivacyProfile(const BrdpMechanism& mech, double epsilon) {
  const ShiftWeight shift = ShiftParams(mech.kernel, mech.bound, mech.q);
  const double base = PrivacyProfile(mech.kernel, epsilon);
  if (shift.L == 0 || shift.W == 0) return base;
  const double shifted =
      shift.L == kInf ? 1.0 : PrivacyProfile(mech.kernel, epsilon - shift.L);
  return std::clamp((1 - shift.W) * base + shift.W * shifted, 0.0, 1.0);
}

namespace {

// H_eps(P || Q) where P is the output law for answer `from` and Q for `to`.
double DirectedHockeyStick(const BrdpMechanism& mech, double epsilon,
                           double from, double to) {
  const CalibratedKernel& k = mech.kernel;
  const double theta = mech.bound.theta;
  const double norm = Normaliser(PTheta(k, theta), mech.q);
  std::vector<double> edges = {-kInf, kInf};
  for (double centre : {from, to}) {
    if (theta != kInf) {
      edges.push_back(centre - theta);
      edges.push_back(centre + theta);
    }
    if (k.kind == KernelKind::kLaplace) edges.push_back(centre);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  auto factor = [&](double t, double centre) {
    return std::abs(t - centre) <= theta ? 1.0 : OutsideFactor(mech.q);
  };
  // The kernel loss between the two centres, as a function of t.
  const double shift = to - from;
  CalibratedKernel oriented = k;
  oriented.sensitivity = std::abs(shift);
  auto kernel_loss = [&](double t) {
    // log f(t - from) - log f(t - to)
    return shift > 0 ? PrivacyLoss(oriented, t - from)
                     : PrivacyLoss(oriented, from - t);
  };

  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0;
  double error_total = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double a = edges[i];
    double b = edges[i + 1];
    double mid;
    if (std::isinf(a) && std::isinf(b)) {
      mid = 0;
    } else if (std::isinf(a)) {
      mid = b - 1;
    } else if (std::isinf(b)) {
      mid = a + 1;
    } else {
      mid = 0.5 * (a + b);
    }
    const double r_p = factor(mid, from);
    const double r_q = factor(mid, to);
    if (r_p == 0) continue;
    // P > e^eps Q  <=>  kernel loss > eps - log(r_p / r_q).
    const double cut = epsilon - std::log(r_p) + std::log(r_q);
    // The loss is monotone in t: decreasing for shift > 0, increasing below.
    const double s = LossThreshold(oriented, cut);
    const double threshold = shift > 0 ? from + s : from - s;
    if (shift > 0) {
      b = std::min(b, threshold);
    } else {
      a = std::max(a, threshold);
    }
    if (!(a < b)) continue;
    auto integrand = [&](double t) {
      const double density = Pdf(k, t - from);
      if (density == 0) return 0.0;
      return -r_p * density * std::expm1(cut - kernel_loss(t)) / norm;
    };
    double error = 0;
    total +=
        Quadrature::integrate(integrand, a, b, 10, 1e-13, &error);
    error_total += error;
  }
  if (!(error_total <= 1e-10 + 1e-9 * std::abs(total))) {
    Fail(ErrorCategory::kAccuracy,
         "hockey-stick quadrature missed tolerance (error estimate " +
             std::to_string(error_total) + ")");
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace

double BrdpExactProfile(const BrdpMechanism& mech, double epsilon) {
  if (epsilon == kInf) return 0.0;
  const double d = mech.kernel.sensitivity;
  return std::max(DirectedHockeyStick(mech, epsilon, 0.0, d),
                  DirectedHockeyStick(mech, epsilon, d, 0.0));
}

}  // namespace brdp
