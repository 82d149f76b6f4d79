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

#include <cmath>

#include <gtest/gtest.h>

#include "brdp/pld.h"

namespace brdp {
namespace {

TEST(PldGrid, MassIsConserved) {
  for (const CalibratedKernel& k :
       {MakeKernel(KernelKind::kGaussian, 1.0, 1.0),
        MakeKernel(KernelKind::kGaussian, 30.0, 1.0),
        MakeKernel(KernelKind::kLaplace, 1.0, 1.0),
        MakeKernel(KernelKind::kLaplace, 0.2, 1.0)}) {
    const PldGrid grid = DefaultPldGrid(k);
    EXPECT_NEAR(grid.total_mass(), 1.0, 1e-9);
    EXPECT_GE(grid.mass.minCoeff(), 0.0);
  }
}

TEST(PldGrid, LaplaceSupportIsBounded) {
  const CalibratedKernel k = MakeKernel(KernelKind::kLaplace, 0.7, 1.0);
  const PldGrid grid = DefaultPldGrid(k);
  const double max_loss = 1.0 / 0.7;
  EXPECT_GE(grid.loss_at(0), -max_loss - grid.step);
  EXPECT_LE(grid.loss_at(grid.cells() - 1), max_loss + grid.step);
  // The last cell holds the atom of mass 1/2 at +max_loss plus half a step
  // of continuous mass.
  EXPECT_GE(grid.mass[grid.cells() - 1], 0.5);
  EXPECT_LT(grid.mass[grid.cells() - 1], 0.5 + grid.step);
}

TEST(PldGrid, DeltaMatchesContinuousProfile) {
  for (const CalibratedKernel& k :
       {MakeKernel(KernelKind::kGaussian, 1.0, 1.0),
        MakeKernel(KernelKind::kGaussian, 3.7, 1.0),
        MakeKernel(KernelKind::kLaplace, 1.0, 1.0),
        MakeKernel(KernelKind::kLaplace, 0.15, 1.0)}) {
    const GridProfile profile(DefaultPldGrid(k));
    for (double eps = 0; eps <= 10; eps += 0.25) {
      EXPECT_NEAR(profile(eps),
                  PrivacyProfile(k, eps, ProfileMethod::kQuadrature), 1e-5)
          << "kind=" << KernelName(k.kind) << " scale=" << k.scale
          << " eps=" << eps;
    }
  }
}

TEST(PldGrid, TooCoarseGridIsAResolutionError) {
  const CalibratedKernel k = MakeKernel(KernelKind::kGaussian, 1.0, 1.0);
  try {
    MakePldGrid(k, -0.1, 0.01, 20);
    FAIL() << "expected a resolution error";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kResolution);
  }
  EXPECT_THROW(MakePldGrid(k, 0, 0.1, 1), Error);
}

TEST(Convolve, PreservesMassAndMatchesDirectSum) {
  const CalibratedKernel k = MakeKernel(KernelKind::kGaussian, 0.5, 1.0);
  const PldGrid grid = DefaultPldGrid(k);
  // Large enough for the FFT path.
  const PldGrid twice = Convolve(grid, grid);
  EXPECT_NEAR(twice.total_mass(), 1.0, 1e-9);
  const PldGrid small = MakePldGrid(MakeKernel(KernelKind::kLaplace, 1.0, 1.0),
                                    -1.0, 0.5, 5);
  const PldGrid sq = Convolve(small, small, 0.0);
  for (Eigen::Index i = 0; i < sq.cells(); ++i) {
    double direct = 0;
    for (Eigen::Index j = 0; j < small.cells(); ++j) {
      const Eigen::Index r = i - j;
      if (r >= 0 && r < small.cells()) direct += small.mass[j] * small.mass[r];
    }
    EXPECT_NEAR(sq.mass[i], direct, 1e-15);
  }
  EXPECT_DOUBLE_EQ(sq.origin, -2.0);
}

TEST(Convolve, FftAgreesWithDirect) {
  const CalibratedKernel k = MakeKernel(KernelKind::kGaussian, 0.8, 1.0);
  const PldGrid grid = DefaultPldGrid(k, 0.01);
  const PldGrid fft = Convolve(grid, grid, 0.0);
  // Direct reference.
  Eigen::VectorXd direct = Eigen::VectorXd::Zero(2 * grid.cells() - 1);
  for (Eigen::Index i = 0; i < grid.cells(); ++i) {
    direct.segment(i, grid.cells()) += grid.mass[i] * grid.mass;
  }
  ASSERT_EQ(fft.cells(), direct.size());
  EXPECT_LT((fft.mass - direct).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SelfConvolve, GaussianComposesToScaledNormal) {
  // Four uses of sigma behave like one use of sigma / 2.
  const CalibratedKernel k = MakeKernel(KernelKind::kGaussian, 2.0, 1.0);
  const CalibratedKernel equivalent = MakeKernel(KernelKind::kGaussian, 1.0, 1.0);
  const GridProfile four(SelfConvolve(DefaultPldGrid(k), 4));
  for (double eps : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    EXPECT_NEAR(four(eps), PrivacyProfile(equivalent, eps), 1e-5);
  }
}

TEST(MixWithShift, IdentityCasesAndMass) {
  const PldGrid grid = DefaultPldGrid(MakeKernel(KernelKind::kLaplace, 1.0, 1.0));
  const PldGrid same = MixWithShift(grid, 0.3, 0.0);
  EXPECT_EQ(same.mass, grid.mass);
  const PldGrid mixed = MixWithShift(grid, 0.3, 0.2345);
  EXPECT_NEAR(mixed.total_mass(), 1.0, 1e-9);
  const PldGrid infinite = MixWithShift(grid, 0.3, INFINITY);
  EXPECT_NEAR(infinite.tail_mass, 0.3, 1e-9);
  EXPECT_NEAR(DeltaFromGrid(infinite, 50.0), 0.3, 1e-9);
}

TEST(SubsampledGrid, RateOneIsIdentityAndMassKept) {
  const PldGrid grid = DefaultPldGrid(MakeKernel(KernelKind::kGaussian, 1.0, 1.0));
  EXPECT_EQ(SubsampledGrid(grid, 1.0, true).mass, grid.mass);
  for (bool remove : {true, false}) {
    const PldGrid sub = SubsampledGrid(grid, 0.2, remove);
    EXPECT_NEAR(sub.total_mass(), 1.0, 1e-9);
  }
}

TEST(SubsampledGrid, MatchesAmplifiedGaussianProfile) {
  // For the remove direction at eps >= 0, delta'(eps') = p delta(eps) where
  // eps = log(1 + (e^eps' - 1) / p) is tight for a Gaussian pair.
  const CalibratedKernel k = MakeKernel(KernelKind::kGaussian, 1.0, 1.0);
  const double p = 0.3;
  const GridProfile sub(SubsampledGrid(DefaultPldGrid(k), p, true));
  for (double eps_out : {0.2, 0.5, 1.0}) {
    const double eps_in = std::log1p(std::expm1(eps_out) / p);
    EXPECT_NEAR(sub(eps_out), p * PrivacyProfile(k, eps_in), 2e-5);
  }
}

}  // namespace
}  // namespace brdp
