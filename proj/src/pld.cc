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

#include "brdp/pld.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace brdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Eigen::Index kMaxCells = Eigen::Index{1} << 25;
constexpr Eigen::Index kDirectLimit = 1 << 16;

// Pr(Z > z) for the kernel's privacy loss, the complement of LossCdf without
// cancellation in the upper tail.
double LossSurvival(const CalibratedKernel& kernel, double z) {
  const double t = LossThreshold(kernel, z);
  if (t == kInf) return 1.0;
  if (t == -kInf) return 0.0;
  return Cdf(kernel, t);
}

void CheckCells(Eigen::Index cells) {
  if (cells > kMaxCells) {
    Fail(ErrorCategory::kResolution,
         "PLD grid needs " + std::to_string(cells) + " cells, above the limit");
  }
}

// Moves at most `budget` of mass from each end of the grid into the tail.
void TrimEnds(PldGrid& grid, double budget) {
  const Eigen::Index n = grid.cells();
  Eigen::Index first = 0;
  double removed = 0;
  while (first < n - 1 && removed + grid.mass[first] <= budget) {
    removed += grid.mass[first++];
  }
  Eigen::Index last = n - 1;
  double removed_right = 0;
  while (last > first && removed_right + grid.mass[last] <= budget) {
    removed_right += grid.mass[last--];
  }
  grid.tail_mass += removed + removed_right;
  grid.origin += static_cast<double>(first) * grid.step;
  grid.mass = grid.mass.segment(first, last - first + 1).eval();
}

Eigen::VectorXd LinearConvolve(const Eigen::VectorXd& a,
                               const Eigen::VectorXd& b) {
  const Eigen::Index n = a.size() + b.size() - 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  if (std::min(a.size(), b.size()) <= 64 || a.size() * b.size() <= kDirectLimit) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      out.segment(i, b.size()) += a[i] * b;
    }
    return out;
  }
  std::size_t padded = 1;
  while (padded < static_cast<std::size_t>(n)) padded <<= 1;
  std::vector<double> x(padded, 0.0);
  std::vector<double> y(padded, 0.0);
  std::copy(a.data(), a.data() + a.size(), x.begin());
  std::copy(b.data(), b.data() + b.size(), y.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fx;
  std::vector<std::complex<double>> fy;
  fft.fwd(fx, x);
  fft.fwd(fy, y);
  for (std::size_t i = 0; i < fx.size(); ++i) fx[i] *= fy[i];
  std::vector<double> product;
  fft.inv(product, fx);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = std::max(0.0, product[i]);
  return out;
}

}  // namespace

PldGrid MakePldGrid(const CalibratedKernel& kernel, double origin, double step,
                    Eigen::Index cells) {
  if (!(step > 0) || cells < 2) {
    Fail(ErrorCategory::kDomain, "PLD grid needs step > 0 and cells >= 2");
  }
  CheckCells(cells);
  PldGrid grid;
  grid.origin = origin;
  grid.step = step;
  grid.mass.resize(cells);
  // Cell i holds the loss mass in (z_i - h/2, z_i + h/2].
  const double half = 0.5 * step;
  for (Eigen::Index i = 0; i < cells; ++i) {
    const double z = grid.loss_at(i);
    double m;
    if (LossCdf(kernel, z) <= 0.5) {
      m = LossCdf(kernel, z + half) - LossCdf(kernel, z - half);
    } else {
      m = LossSurvival(kernel, z - half) - LossSurvival(kernel, z + half);
    }
    grid.mass[i] = std::max(0.0, m);
  }
  grid.tail_mass = LossCdf(kernel, origin - half) +
                   LossSurvival(kernel, grid.loss_at(cells - 1) + half);
  if (grid.mass.sum() < 1 - 1e-6) {
    Fail(ErrorCategory::kResolution,
         "PLD grid holds less than 1 - 1e-6 of the loss mass");
  }
  return grid;
}

PldGrid DefaultPldGrid(const CalibratedKernel& kernel, double step) {
  if (kernel.kind == KernelKind::kLaplace) {
    // Align the atoms at +-D/b with cell centres.
    const double max_loss = MaxLoss(kernel);
    const double k = std::max(1.0, std::ceil(max_loss / step - 1e-9));
    CheckCells(static_cast<Eigen::Index>(2 * k + 1));
    return MakePldGrid(kernel, -max_loss, max_loss / k,
                       static_cast<Eigen::Index>(2 * k + 1));
  }
  const double ratio = kernel.sensitivity / kernel.scale;
  const double mean = 0.5 * ratio * ratio;
  const double lo = std::floor((mean - 20 * ratio) / step);
  const double hi = std::ceil((mean + 20 * ratio) / step);
  const double cells = hi - lo + 1;
  if (cells > static_cast<double>(kMaxCells)) CheckCells(kMaxCells + 1);
  return MakePldGrid(kernel, lo * step, step, static_cast<Eigen::Index>(cells));
}

GridProfile::GridProfile(PldGrid grid) : grid_(std::move(grid)) {
  const Eigen::Index n = grid_.cells();
  upper_mass_.resize(n + 1);
  upper_weighted_.resize(n + 1);
  upper_mass_[n] = 0;
  upper_weighted_[n] = 0;
  const double decay = std::exp(-grid_.step);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    upper_mass_[i] = grid_.mass[i] + upper_mass_[i + 1];
    upper_weighted_[i] = grid_.mass[i] + decay * upper_weighted_[i + 1];
  }
}

double GridProfile::operator()(double epsilon) const {
  if (std::isnan(epsilon)) Fail(ErrorCategory::kDomain, "epsilon is NaN");
  const Eigen::Index n = grid_.cells();
  if (epsilon == -kInf) return std::min(1.0, grid_.total_mass());
  Eigen::Index i;
  const double offset = (epsilon - grid_.origin) / grid_.step;
  if (offset < 0) {
    i = 0;
  } else if (offset >= static_cast<double>(n)) {
    i = n;
  } else {
    i = static_cast<Eigen::Index>(std::floor(offset)) + 1;
  }
  while (i > 0 && grid_.loss_at(i - 1) > epsilon) --i;
  while (i < n && grid_.loss_at(i) <= epsilon) ++i;
  double delta = grid_.tail_mass;
  if (i < n) {
    delta += upper_mass_[i] -
             std::exp(epsilon - grid_.loss_at(i)) * upper_weighted_[i];
  }
  return std::clamp(delta, 0.0, 1.0);
}

double DeltaFromGrid(const PldGrid& grid, double epsilon) {
  return GridProfile(grid)(epsilon);
}

PldGrid Convolve(const PldGrid& a, const PldGrid& b, double truncation_mass) {
  if (std::abs(a.step - b.step) > 1e-12 * a.step) {
    Fail(ErrorCategory::kDomain, "cannot convolve grids with different steps");
  }
  CheckCells(a.cells() + b.cells() - 1);
  PldGrid out;
  out.step = a.step;
  out.origin = a.origin + b.origin;
  out.mass = LinearConvolve(a.mass, b.mass);
  const double sum_a = a.mass.sum();
  out.tail_mass = a.tail_mass * (b.mass.sum() + b.tail_mass) +
                  sum_a * b.tail_mass;
  // Rounding in the FFT path can shift the inside mass by a few ulps.
  const double expected = sum_a * b.mass.sum();
  const double actual = out.mass.sum();
  if (actual > 0) out.mass *= expected / actual;
  TrimEnds(out, truncation_mass);
  return out;
}

PldGrid SelfConvolve(const PldGrid& grid, int times, double truncation_mass) {
  if (times < 1) Fail(ErrorCategory::kDomain, "composition count must be >= 1");
  PldGrid base = grid;
  PldGrid result;
  bool have_result = false;
  unsigned remaining = static_cast<unsigned>(times);
  while (remaining > 0) {
    if (remaining & 1u) {
      result = have_result ? Convolve(result, base, truncation_mass) : base;
      have_result = true;
    }
    remaining >>= 1;
    if (remaining > 0) base = Convolve(base, base, truncation_mass);
  }
  return result;
}

PldGrid MixWithShift(const PldGrid& grid, double weight, double shift) {
  if (!(weight >= 0 && weight <= 1) || !(shift >= 0)) {
    Fail(ErrorCategory::kDomain, "shift weight must lie in [0, 1], shift >= 0");
  }
  if (weight == 0 || shift == 0) return grid;
  PldGrid out = grid;
  if (shift == kInf) {
    out.mass *= 1 - weight;
    out.tail_mass = grid.tail_mass + weight * grid.mass.sum();
    return out;
  }
  const double cells_shift = shift / grid.step;
  const double whole = std::floor(cells_shift);
  const double frac = cells_shift - whole;
  const Eigen::Index s = static_cast<Eigen::Index>(whole);
  const Eigen::Index n = grid.cells();
  CheckCells(n + s + 1);
  out.mass = Eigen::VectorXd::Zero(n + s + (frac > 0 ? 1 : 0));
  out.mass.head(n) = (1 - weight) * grid.mass;
  out.mass.segment(s, n) += weight * (1 - frac) * grid.mass;
  if (frac > 0) out.mass.segment(s + 1, n) += weight * frac * grid.mass;
  return out;
}

PldGrid SubsampledGrid(const PldGrid& grid, double p, bool remove) {
  if (!(p > 0 && p <= 1)) {
    Fail(ErrorCategory::kDomain, "sampling rate must lie in (0, 1]");
  }
  if (p == 1) return grid;
  const Eigen::Index n = grid.cells();
  std::vector<double> loss(n);
  std::vector<double> weight(n);
  // Under Q the original loss has law e^{-z} f_Z(z). The discretised grid
  // only satisfies sum m e^{-z} = sum m approximately, so that part is
  // renormalised to keep the total mass.
  double q_side = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    q_side += grid.mass[i] * std::exp(-grid.loss_at(i));
  }
  const double q_scale = q_side > 0 ? grid.mass.sum() / q_side : 0.0;
  double lo = kInf;
  double hi = -kInf;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = grid.loss_at(i);
    const double mapped = std::log1p(p * std::expm1(z));
    const double under_q = grid.mass[i] * std::exp(-z) * q_scale;
    if (remove) {
      loss[i] = mapped;
      weight[i] = p * grid.mass[i] + (1 - p) * under_q;
    } else {
      loss[i] = -mapped;
      weight[i] = under_q;
    }
    if (weight[i] > 0) {
      lo = std::min(lo, loss[i]);
      hi = std::max(hi, loss[i]);
    }
  }
  PldGrid out;
  out.step = grid.step;
  out.tail_mass = grid.tail_mass;
  if (!(lo <= hi)) {
    out.origin = 0;
    out.mass = Eigen::VectorXd::Zero(2);
    return out;
  }
  const double first = std::floor(lo / grid.step);
  const Eigen::Index cells =
      static_cast<Eigen::Index>(std::ceil(hi / grid.step) - first) + 2;
  CheckCells(cells);
  out.origin = first * grid.step;
  out.mass = Eigen::VectorXd::Zero(cells);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weight[i] == 0) continue;
    const double pos = (loss[i] - out.origin) / grid.step;
    const double base = std::floor(pos);
    const double frac = pos - base;
    const Eigen::Index j = static_cast<Eigen::Index>(base);
    out.mass[j] += weight[i] * (1 - frac);
    if (frac > 0) out.mass[j + 1] += weight[i] * frac;
  }
  return out;
}

}  // namespace brdp
