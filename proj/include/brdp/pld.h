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

#ifndef BRDP_PLD_H_
#define BRDP_PLD_H_

#include <cstddef>

#include <Eigen/Dense>

#include "brdp/noise_kernels.h"

namespace brdp {

// Privacy loss distribution discretised on a uniform grid. Cell i carries the
// probability of losses in (z_i - step/2, z_i + step/2], z_i = origin + i*step.
// Mass that falls outside the grid is kept in tail_mass and is charged to
// delta in full.
struct PldGrid {
  double origin = 0;
  double step = 1e-3;
  Eigen::VectorXd mass;
  double tail_mass = 0;

  Eigen::Index cells() const { return mass.size(); }
  double loss_at(Eigen::Index i) const {
    return origin + static_cast<double>(i) * step;
  }
  double total_mass() const { return mass.sum() + tail_mass; }
};

inline constexpr double kDefaultPldStep = 1e-3;
// Mass dropped from each end after a convolution.
inline constexpr double kDefaultTruncationMass = 1e-15;

// Discretises the kernel's privacy loss on cells [origin, origin+(cells-1)*step].
// Throws kResolution when less than 1 - 1e-6 of the mass lands inside.
PldGrid MakePldGrid(const CalibratedKernel& kernel, double origin, double step,
                    Eigen::Index cells);

// Grid sized to the kernel. For Gaussian: mean +- 20 standard deviations of the
// (normal) loss. For Laplace: the bounded support [-D/b, D/b], with the step
// shrunk so that both endpoint atoms sit on cell centres.
PldGrid DefaultPldGrid(const CalibratedKernel& kernel,
                       double step = kDefaultPldStep);

// E[max(0, 1 - exp(epsilon - Z))] over the grid, plus tail_mass.
double DeltaFromGrid(const PldGrid& grid, double epsilon);

// PLD of the composition of two independent mechanisms on the same step.
PldGrid Convolve(const PldGrid& a, const PldGrid& b,
                 double truncation_mass = kDefaultTruncationMass);

// T-fold self composition by repeated squaring.
PldGrid SelfConvolve(const PldGrid& grid, int times,
                     double truncation_mass = kDefaultTruncationMass);

// (1 - weight) * grid + weight * (grid shifted right by `shift`). A shift that
// is not a multiple of the step is split linearly between the two neighbouring
// grid offsets, which preserves the mean. shift = +inf moves the weight into
// tail_mass.
// Mixture (1 - weight) * Z + weight * (Z + shift). A finite shift that is not
// a grid multiple is split linearly between the two neighbouring cells; an
// infinite shift moves the weighted mass into the tail.
PldGrid MixWithShift(const PldGrid& grid, double weight, double shift);

// Privacy loss of Poisson subsampling at rate p applied to a pair with loss
// grid `grid`. `remove` selects the (pP + (1-p)Q, Q) direction, otherwise
// (Q, pP + (1-p)Q). The result lives on the same step.
PldGrid SubsampledGrid(const PldGrid& grid, double p, bool remove);

// Answers delta(eps) queries on a fixed grid in O(log n) after O(n) setup.
class GridProfile {
 public:
  explicit GridProfile(PldGrid grid);

  double operator()(double epsilon) const;
  const PldGrid& grid() const { return grid_; }

 private:
  PldGrid grid_;
  Eigen::VectorXd upper_mass_;      // sum of mass over cells j >= i
  Eigen::VectorXd upper_weighted_;  // sum of mass_j * exp(z_i - z_j), j >= i
};

}  // namespace brdp

#endif  // BRDP_PLD_H_
