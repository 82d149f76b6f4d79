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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "brdp/composition.h"
#include "brdp/harness.h"

namespace {

using namespace brdp;

constexpr KernelKind kKinds[] = {KernelKind::kGaussian, KernelKind::kLaplace};
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

const char* Name(KernelKind k) { return k == KernelKind::kGaussian ? "gau" : "lap"; }

AllocationResult AllocateFor(KernelKind kind, double eps, double delta,
                             double sensitivity, double theta) {
  AllocationOptions opt;
  opt.kind = kind;
  return Allocate({eps, delta}, sensitivity, theta, opt);
}

// The grid shared by criteria 1 and 12.
struct GridCell {
  KernelKind kind;
  double eps_y, theta, q;
};

std::vector<GridCell> NormalisationGrid() {
  std::vector<GridCell> cells;
  for (KernelKind kind : kKinds) {
    for (double e : {0.1, 1.0, 3.0}) {
      for (double th : {0.5, 1.0, 5.0}) {
        for (double q : {0.0, 0.3, 0.9}) cells.push_back({kind, e, th, q});
      }
    }
  }
  return cells;
}

BrdpMechanism CellMechanism(const GridCell& c) {
  return MakeMechanism(Calibrate(c.kind, {c.eps_y, 1e-5}, 1.0), c.q, c.theta);
}

Outcome Criterion1() {
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  double worst = 0;
  for (const GridCell& c : NormalisationGrid()) {
    const BrdpMechanism m = CellMechanism(c);
    auto pdf = [&](double y) { return BrdpPdf(m, 0.0, y); };
    const double edges[] = {-kInf, -c.theta, 0.0, c.theta, kInf};
    double total = 0;
    for (int i = 0; i < 4; ++i) {
      total += Quadrature::integrate(pdf, edges[i], edges[i + 1], 15, 1e-13);
    }
    worst = std::max(worst, std::abs(total - 1));
  }
  return {worst <= 1e-6,
          Fmt("54 cells, max |integral - 1| = %.3g (limit 1e-6)", worst)};
}

Outcome Criterion2() {
  struct Cell {
    KernelKind kind;
    double eps_y, theta, q;
  };
  const std::vector<Cell> cells = {
      {KernelKind::kGaussian, 1.0, 1.0, 0.5},
      {KernelKind::kGaussian, 0.5, 2.0, 0.9},
      {KernelKind::kGaussian, 3.0, 0.5, 0.3},
      {KernelKind::kLaplace, 1.0, 1.0, 0.5},
      {KernelKind::kLaplace, 0.5, 2.0, 0.9},
      {KernelKind::kLaplace, 3.0, 0.5, 0.3},
  };
  const int n = 100000;
  double worst_acc = 0, worst_rounds = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    const BrdpMechanism m =
        MakeMechanism(Calibrate(c.kind, {c.eps_y, 1e-5}, 1.0), c.q, c.theta);
    Rng rng(SubstreamSeed(2, i, 0));
    std::int64_t accepted = 0;
    double r1 = 0, r2 = 0;
    for (int t = 0; t < n; ++t) {
      const Release r = Sample(m, 0.0, rng);
      if (std::abs(r.value) <= c.theta) ++accepted;
      r1 += static_cast<double>(r.rounds);
      r2 += static_cast<double>(r.rounds) * static_cast<double>(r.rounds);
    }
    const double rate = AcceptanceRate(m);
    const double se = std::sqrt(rate * (1 - rate) / n);
    worst_acc = std::max(worst_acc, std::abs(accepted / double(n) - rate) / se);
    const double mean = r1 / n;
    const double expected = 1 / (1 - BarPTheta(m.kernel, c.theta) * c.q);
    const double sd = std::sqrt(std::max(0.0, (r2 - n * mean * mean) / (n - 1)));
    if (sd > 0) {
      worst_rounds = std::max(worst_rounds, std::abs(mean - expected) / (sd / std::sqrt(n)));
    }
  }
  return {worst_acc <= 3 && worst_rounds <= 3,
          Fmt("6 cells x 1e5 draws, max |z| acceptance = %.2f, rounds = %.2f "
              "(limit 3)",
              worst_acc, worst_rounds)};
}

Outcome Criterion3() {
  const CalibratedKernel k = MakeKernel(KernelKind::kGaussian, 1.0, 1.0);
  const ShiftWeight s = ShiftParams(k, MakeErrorBound(1.0), 0.5);
  const bool ok = std::abs(s.W - 0.34134) <= 1e-5 &&
                  std::abs(s.L - std::log(2.0)) <= 1e-12;
  return {ok, Fmt("W = %.8f (want 0.34134 +- 1e-5), L - log 2 = %.3g", s.W,
                  s.L - std::log(2.0))};
}

Outcome Criterion4() {
  const BudgetPair total{3, 1e-5};
  const double tol = 1e-4;
  bool ok = true;
  std::string detail;
  double prev_q = 2, prev_base = 2;
  bool ordered = true;
  for (double ey : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    const CalibratedKernel k = CalibrateGaussian({ey, 1e-5}, 1.0);
    const double q = FindQ(k, 1.0, total, tol);
    const double base = BaselineQ(3, ey);
    const double at = BrdpPrivacyProfile(MakeMechanism(k, q, 1.0), 3);
    const bool tight =
        q + 2 * tol > 1 ||
        BrdpPrivacyProfile(MakeMechanism(k, q + 2 * tol, 1.0), 3) > 1e-5;
    ok = ok && q > base && at <= 1e-5 && tight;
    ordered = ordered && q <= prev_q && base <= prev_base;
    prev_q = q;
    prev_base = base;
    detail += Fmt("%s%.1f:q=%.4f/base=%.4f", detail.empty() ? "" : " ", ey, q, base);
  }
  return {ok && ordered,
          detail + (ordered ? " (both decrease in eps_y)" : " (ordering broken)")};
}

Outcome Criterion5() {
  bool dominates = true;
  double worst = kInf;
  double gap1[2] = {0, 0}, gap5[2] = {0, 0};
  for (int ki = 0; ki < 2; ++ki) {
    const KernelKind kind = kKinds[ki];
    for (double sens : {1.0, 5.0}) {
      for (double eps : {0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) {
        const double brdp = AllocateFor(kind, eps, 1e-5, sens, 1.0).acceptance;
        const double dp = AcceptanceRate(
            MakeMechanism(Calibrate(kind, {eps, 1e-5}, sens), 0, 1.0));
        worst = std::min(worst, brdp - dp);
        dominates = dominates && brdp >= dp - 1e-9;
        if (eps == 2.0) (sens == 1.0 ? gap1 : gap5)[ki] = brdp - dp;
      }
    }
  }
  const bool gaps = gap5[0] > gap1[0] && gap5[1] > gap1[1];
  return {dominates && gaps,
          Fmt("min(brdp - dp) = %.3g; gap at eps=2: gau D1=%.4g D5=%.4g, "
              "lap D1=%.4g D5=%.4g",
              worst, gap1[0], gap5[0], gap1[1], gap5[1])};
}

Outcome Criterion6() {
  double worst = 0;
  for (KernelKind kind : kKinds) {
    for (double q : {0.3, 0.9}) {
      const BrdpMechanism m =
          MakeMechanism(Calibrate(kind, {1.0, 1e-5}, 1.0), q, 1.0);
      for (int T : {2, 3, 5}) {
        for (double eps : {0.0, 0.5, 1.0, 2.0, 4.0}) {
          worst = std::max(worst, std::abs(BrdpProfileT({m, T, eps}) -
                                           BruteForceT(m, T, eps)));
        }
      }
    }
  }
  return {worst <= 1e-4,
          Fmt("max |binomial - brute force| = %.3g (limit 1e-4)", worst)};
}

double ComposedEpsilon(const BrdpMechanism& m, int T, double delta) {
  const ComposedKernelProfile kp(m.kernel, T);
  return EpsilonAtDelta([&](double e) { return BrdpProfileT(m, e, kp); },
                        delta);
}

Outcome Criterion7() {
  const BrdpMechanism brdp =
      AllocateFor(KernelKind::kGaussian, 1.0, 1e-5, 1.0, 1.0).mechanism();
  const BrdpMechanism dp =
      MakeMechanism(CalibrateGaussian({1.0, 1e-5}, 1.0), 0, 1.0);
  bool ok = true;
  std::string detail;
  for (int T : {10, 50, 100}) {
    const double b = ComposedEpsilon(brdp, T, 1e-5);
    const double d = ComposedEpsilon(dp, T, 1e-5);
    ok = ok && b <= d;
    detail += Fmt("%sT=%d brdp=%.4f dp=%.4f", detail.empty() ? "" : "; ", T, b, d);
  }
  return {ok, detail};
}

Outcome Criterion8() {
  const int T = 1000;
  const BudgetPair per{0.1, 1e-5};
  const double p = 0.5;
  bool ok = true;
  std::string detail;
  for (KernelKind kind : kKinds) {
    const BrdpMechanism dp = MakeMechanism(Calibrate(kind, per, 1.0), 0, 1.0);
    const BrdpMechanism brdp = AllocateFor(kind, 0.1, 1e-5, 1.0, 1.0).mechanism();
    const BudgetPair inner = Deamplify(per, p);
    const BrdpMechanism sub =
        AllocateFor(kind, inner.epsilon, inner.delta, 1.0 / p, 1.0).mechanism();
    const SubsampledProfileT sub_profile(sub, p, T);
    for (double delta : {1e-5, 1e-10}) {
      const double e_dp = ComposedEpsilon(dp, T, delta);
      const double e_br = ComposedEpsilon(brdp, T, delta);
      const double e_sub =
          EpsilonAtDelta([&](double e) { return sub_profile(e); }, delta);
      ok = ok && e_br <= e_dp && e_sub >= e_br;
      detail += Fmt("%s%s d=%g dp=%.4f brdp=%.4f sub=%.4f",
                    detail.empty() ? "" : "; ", Name(kind), delta, e_dp, e_br,
                    e_sub);
      if (kind == KernelKind::kGaussian) {
        const double want = delta == 1e-5 ? 4.77 : 7.17;
        ok = ok && std::abs(e_dp - want) <= 0.15 * want;
      }
    }
  }
  return {ok, detail + " (gau dp within 15% of 4.77/7.17; p=0.5)"};
}

Outcome Criterion9() {
  // Population with exact moments: mean 0, std 10, and 10% above the cut.
  const int n = 10000;
  DatasetTable t = SyntheticTable(n, 0, 10, -1e9, 1e9, 9);
  double mean = RunQuery(t, QueryKind::kAverage);
  double var = 0;
  for (double& x : t.values) x -= mean;
  for (double x : t.values) var += x * x;
  const double s = std::sqrt(var / (n - 1));
  for (double& x : t.values) x *= 10 / s;
  std::vector<double> sorted = t.values;
  std::sort(sorted.begin(), sorted.end());
  const Predicate pred{0.5 * (sorted[n - 1001] + sorted[n - 1000]), kInf};
  const PopulationModel pop{n, 0, 10, 0.1};

  double worst = 0;
  std::string detail;
  for (double p : {0.1, 0.3, 0.7}) {
    for (QueryKind kind :
         {QueryKind::kSum, QueryKind::kAverage, QueryKind::kCount}) {
      Rng rng(SubstreamSeed(9, static_cast<std::uint64_t>(p * 10),
                            static_cast<std::uint64_t>(kind)));
      const int draws = 10000;
      double s1 = 0, s2 = 0;
      for (int i = 0; i < draws; ++i) {
        const double x = RunSubsampledQuery(t.values, kind, pred, p, rng);
        s1 += x;
        s2 += x * x;
      }
      const double m = s1 / draws;
      const double sd = std::sqrt((s2 - draws * m * m) / (draws - 1));
      const double rel = sd / SamplingSigma(kind, pop, p) - 1;
      worst = std::max(worst, std::abs(rel));
    }
  }
  return {worst <= 0.03,
          Fmt("9 cells x 1e4 resamples, max |sd/sigma - 1| = %.4f (limit 0.03)",
              worst)};
}

Outcome Criterion10() {
  const BudgetPair id = Amplify({0.37, 2e-6}, 1.0);
  bool ok = id.epsilon == 0.37 && id.delta == 2e-6;
  double worst = 0;
  for (double eps : {0.01, 0.1, 1.0, 3.0, 8.0}) {
    for (double p : {0.01, 0.2, 0.6, 0.95}) {
      const BudgetPair back = Deamplify(Amplify({eps, 1e-5}, p), p);
      worst = std::max({worst, std::abs(back.epsilon - eps),
                        std::abs(back.delta - 1e-5)});
    }
  }
  const double example = Amplify({0.1, 1e-5}, 0.1).epsilon;
  const double want = std::log(1 + 0.1 * (std::exp(0.1) - 1));
  ok = ok && worst <= 1e-12 && std::abs(example - want) <= 1e-12;
  return {ok, Fmt("identity at p=1 exact=%s, 20-point round-trip max err = "
                  "%.3g, example = %.15f",
                  (id.epsilon == 0.37 && id.delta == 2e-6) ? "yes" : "no",
                  worst, example)};
}

Outcome Criterion11() {
  const BudgetPair total{0.1, 1e-5};
  auto plan = [&](QueryKind kind, std::int64_t size) {
    const PopulationModel pop{size, 0, 10, 0.1};
    const double sens = kind == QueryKind::kSum       ? 22.0
                        : kind == QueryKind::kAverage ? 22.0 / size
                                                      : 1.0;
    const double theta = kind == QueryKind::kSum       ? 5.0
                         : kind == QueryKind::kAverage ? 0.05
                                                       : 3.0;
    return FindP(total, sens, theta, kind, pop);
  };
  const double p_sum = plan(QueryKind::kSum, 10000).plan.p;
  const double p_avg = plan(QueryKind::kAverage, 10000).plan.p;
  bool monotone = true;
  std::string accs;
  for (QueryKind kind : {QueryKind::kAverage, QueryKind::kCount}) {
    double prev = -1;
    for (std::int64_t size : {1000, 10000, 100000}) {
      const double a = plan(kind, size).acceptance;
      monotone = monotone && a >= prev;
      prev = a;
      accs += Fmt(" %s@%lld=%.4f", std::string(QueryName(kind)).c_str(),
                  static_cast<long long>(size), a);
    }
  }
  return {p_sum > 0.9 && p_avg < 0.5 && monotone,
          Fmt("p(sum)=%.4f (want >0.9), p(average)=%.4f (want <0.5);", p_sum,
              p_avg) +
              accs};
}

Outcome Criterion12() {
  double worst = -kInf;
  std::string where;
  for (const GridCell& c : NormalisationGrid()) {
    const BrdpMechanism m = CellMechanism(c);
    for (double eps : {0.0, 0.5, 1.0, 2.0, 3.0, 5.0}) {
      const double excess = BrdpExactProfile(m, eps) - BrdpPrivacyProfile(m, eps);
      if (excess > worst) {
        worst = excess;
        where = Fmt("%s eps_y=%g theta=%g q=%g eps=%g", Name(c.kind), c.eps_y,
                    c.theta, c.q, eps);
      }
    }
  }
  return {worst <= 1e-6,
          Fmt("max(exact - bound) = %.4g at %s (limit 1e-6)", worst,
              where.c_str())};
}

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome Criterion13() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "brdp_acceptance";
  fs::create_directories(dir);
  const std::vector<std::string> configs = {
      R"({"mechanism":"brdp","kernel":"laplace","theta":5,"trials":500,)"
      R"("partitions":4,"seed":13,"report_deltas":[1e-5,1e-10]})",
      R"({"mechanism":"subsampled-brdp","kernel":"gaussian","query":"average",)"
      R"("theta":0.05,"epsilon":0.5,"trials":300,"partitions":2,"seed":99})",
  };
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const fs::path cfg = dir / ("config" + std::to_string(i) + ".json");
    std::ofstream(cfg) << configs[i];
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out =
          dir / ("report" + std::to_string(i) + "_" + std::to_string(run) + ".json");
      fs::remove(out);
      const std::string cmd = std::string("\"") + BRDP_CLI_PATH +
                              "\" experiment --config \"" + cfg.string() +
                              "\" --out \"" + out.string() + "\"";
      if (std::system(cmd.c_str()) != 0) ok = false;
      outputs[run] = Slurp(out);
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    ok = ok && same;
    detail += Fmt("%sconfig %zu: %zu bytes, %s", detail.empty() ? "" : "; ", i,
                  outputs[0].size(), same ? "identical" : "DIFFERENT");
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    double budget_seconds;  // 0 when the criterion has no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {1, 10, Criterion1},  {2, 30, Criterion2},  {3, 0, Criterion3},
      {4, 0, Criterion4},   {5, 0, Criterion5},   {6, 60, Criterion6},
      {7, 0, Criterion7},   {8, 0, Criterion8},   {9, 60, Criterion9},
      {10, 0, Criterion10}, {11, 0, Criterion11}, {12, 0, Criterion12},
      {13, 0, Criterion13},
  };
  int failures = 0;
  for (const Entry& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (e.budget_seconds > 0 && secs > e.budget_seconds) {
      o.pass = false;
      o.detail += Fmt(" [runtime %.1fs over %.0fs limit]", secs, e.budget_seconds);
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << e.id << ": " << (o.pass ? "PASS" : "FAIL")
              << " | " << o.detail << Fmt(" | %.2fs", secs) << std::endl;
  }
  std::cout << (entries.size() - failures) << "/" << entries.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
