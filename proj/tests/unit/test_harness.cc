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
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "brdp/harness.h"

namespace brdp {
namespace {

TEST(IngestCsv, DropsMissingAndClips) {
  std::istringstream in(
      "\xEF\xBB\xBFid,name,value\n"
      "a,\"x, y\",3.5\n"
      "b,z,NA\n"
      "c,w,-4\n"
      "\n"
      "d,v,abc\n"
      "e,u,30\n"
      "f\n");
  const DatasetTable t = IngestCsv(in, "id", "value", 0, 22);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.ids, (std::vector<std::string>{"a", "c", "e"}));
  EXPECT_EQ(t.values, (std::vector<double>{3.5, 0, 22}));
  EXPECT_EQ(t.dropped, 3);
}

TEST(IngestCsv, RowNumbersWithoutIdColumn) {
  std::istringstream in("value\n1\n2\n");
  const DatasetTable t = IngestCsv(in, "", "value", 0, 10);
  EXPECT_EQ(t.ids, (std::vector<std::string>{"0", "1"}));
}

TEST(IngestCsv, Errors) {
  auto category = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.category();
    }
    return ErrorCategory::kDomain;
  };
  EXPECT_EQ(category([] {
              std::istringstream in("id,other\n1,2\n");
              IngestCsv(in, "id", "value", 0, 1);
            }),
            ErrorCategory::kSchema);
  EXPECT_EQ(category([] {
              std::istringstream in("value\nNA\n\n");
              IngestCsv(in, "", "value", 0, 1);
            }),
            ErrorCategory::kEmptyDataset);
  EXPECT_EQ(category([] { IngestCsv("/nonexistent/x.csv", "", "v", 0, 1); }),
            ErrorCategory::kIo);
}

TEST(RunQuery, SumAverageCount) {
  const std::vector<double> v = {1, 2, 3};
  EXPECT_EQ(RunQuery(v, QueryKind::kSum), 6);
  EXPECT_EQ(RunQuery(v, QueryKind::kAverage), 2);
  EXPECT_EQ(RunQuery(v, QueryKind::kCount, {1.5, 10}), 2);
  EXPECT_EQ(RunQuery(v, QueryKind::kCount), 3);
  EXPECT_THROW(RunQuery(std::vector<double>{}, QueryKind::kSum), Error);
}

TEST(RunSubsampledQuery, FullRateIsExact) {
  const std::vector<double> v = {1, 2, 3};
  Rng rng(1);
  EXPECT_EQ(RunSubsampledQuery(v, QueryKind::kSum, {}, 1.0, rng), 6);
}

TEST(RunSubsampledQuery, EstimatorStdMatchesModel) {
  const DatasetTable t = SyntheticTable(10000, 0, 10, -1e9, 1e9, 3);
  const Predicate pred{-1e300, -12.8155};  // about 10% of N(0, 10)
  PopulationModel pop;
  pop.size = 10000;
  pop.sigma_x = 10;
  pop.p_c = 0.1;
  for (QueryKind kind :
       {QueryKind::kSum, QueryKind::kAverage, QueryKind::kCount}) {
    const double p = 0.3;
    Rng rng(SubstreamSeed(5, static_cast<int>(kind), 0));
    const int n = 2000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = RunSubsampledQuery(t.values, kind, pred, p, rng);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n;
    const double sd = std::sqrt((s2 - n * mean * mean) / (n - 1));
    EXPECT_NEAR(sd / SamplingSigma(kind, pop, p), 1.0, 0.08) << QueryName(kind);
  }
}

TEST(Report, JsonRoundTrip) {
  AcceptanceReport r;
  r.params.mechanism = "brdp";
  r.params.kernel = "gaussian";
  r.params.query = "sum";
  r.params.epsilon = 1;
  r.params.delta = 1e-5;
  r.params.L = INFINITY;
  r.trials = 3;
  r.partitions = 1;
  r.seed = 42;
  r.releases = 3;
  r.accepted = 2;
  r.empirical_acceptance = 2.0 / 3;
  r.end_to_end_acceptance = 0.5;
  r.composed_T = 3;
  r.composed = {{1e-5, 2.5}, {1e-10, std::nullopt}};
  r.outputs = {-1, 0.5, 0.5};
  r.warnings = {"w"};
  const nlohmann::json j = ReportToJson(r);
  EXPECT_TRUE(j["parameters"]["L"].is_null());
  EXPECT_EQ(ReportFromJson(j), r);
  EXPECT_EQ(ReportFromJson(nlohmann::json::parse(j.dump())), r);
}

TEST(Report, EmptyQuantilesAreNull) {
  AcceptanceReport r;
  const nlohmann::json j = ReportToJson(r);
  for (const auto& item : j.at("quantiles").items()) {
    EXPECT_TRUE(item.value().is_null()) << item.key();
  }
}

TEST(Report, SchemaError) {
  try {
    ReportFromJson(nlohmann::json::parse(R"({"trials": "x"})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kSchema);
  }
}

TEST(Report, QuantilesType7) {
  EXPECT_EQ(Quantiles({3, 1, 2, 4}, {0, 0.5, 1}),
            (std::vector<double>{1, 2.5, 4}));
  Rng rng(9);
  std::normal_distribution<double> normal;
  std::vector<double> xs(1000);
  for (double& x : xs) x = normal(rng);
  EXPECT_NEAR(Quantiles(xs, {0.5})[0], 0.0, 0.1);
}

TEST(Report, CsvHasLongFormat) {
  AcceptanceReport r;
  r.params.mechanism = "dp";
  std::ostringstream out;
  EmitReport(r, ReportFormat::kCsv, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "section,key,value");
  EXPECT_NE(out.str().find("parameters,mechanism,dp"), std::string::npos);
}

TEST(Config, ParseAndRoundTrip) {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "mechanism": "dp", "kernel": "laplace", "epsilon": 0.5, "theta": 2,
    "query": "count", "predicate": {"lo": 1, "hi": null}, "trials": 7,
    "seed": 11, "dataset": {"clip": [0, 5], "synthetic": {"size": 50}}
  })");
  const ExperimentConfig c = ParseExperimentConfig(j);
  EXPECT_EQ(c.mechanism, MechanismChoice::kDp);
  EXPECT_EQ(c.kernel, KernelKind::kLaplace);
  EXPECT_EQ(c.budget.epsilon, 0.5);
  EXPECT_EQ(c.budget.delta, 1e-5);
  EXPECT_EQ(c.predicate.lo, 1);
  EXPECT_TRUE(std::isinf(c.predicate.hi));
  EXPECT_EQ(c.dataset.synthetic_size, 50);
  EXPECT_EQ(c.dataset.clip_hi, 5);
  const ExperimentConfig back =
      ParseExperimentConfig(nlohmann::json::parse(ConfigToJson(c).dump()));
  EXPECT_EQ(ConfigToJson(back), ConfigToJson(c));
}

TEST(Config, Errors) {
  for (const char* text :
       {R"({"bogus": 1})", R"({"trials": "many"})",
        R"({"dataset": {"clip": [1]}})", R"({"objective": "other"})"}) {
    try {
      ParseExperimentConfig(nlohmann::json::parse(text));
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.category(), ErrorCategory::kSchema) << text;
    }
  }
}

ExperimentConfig SmallConfig(MechanismChoice m) {
  ExperimentConfig c;
  c.mechanism = m;
  c.theta = 5;
  c.trials = 200;
  c.partitions = 2;
  c.seed = 7;
  c.report_deltas = {1e-5};
  c.dataset.synthetic_size = 2000;
  return c;
}

TEST(RunExperiment, DeterministicAndConsistent) {
  for (MechanismChoice m : {MechanismChoice::kDp, MechanismChoice::kBrdp,
                            MechanismChoice::kSubsampledBrdp}) {
    const ExperimentConfig c = SmallConfig(m);
    const DatasetTable t = LoadDataset(c.dataset);
    const AcceptanceReport a = RunExperiment(c, t);
    const AcceptanceReport b = RunExperiment(c, t);
    EXPECT_EQ(a, b) << MechanismName(m);
    EXPECT_EQ(a.releases, 400);
    EXPECT_EQ(a.outputs.size(), 400u);
    EXPECT_FALSE(a.runtime_seconds.has_value());
    ASSERT_EQ(a.composed.size(), 1u);
    EXPECT_TRUE(a.composed[0].epsilon.has_value());
    const double expected = a.params.mechanism == "subsampled-brdp"
                                ? *a.end_to_end_acceptance
                                : a.analytic_acceptance;
    EXPECT_NEAR(a.empirical_acceptance, expected,
                4 * std::sqrt(expected * (1 - expected) / 400) + 1e-9)
        << MechanismName(m);
  }
}

TEST(RunExperiment, SeedChangesOutputs) {
  ExperimentConfig c = SmallConfig(MechanismChoice::kBrdp);
  c.compose = false;
  const DatasetTable t = LoadDataset(c.dataset);
  const AcceptanceReport a = RunExperiment(c, t);
  c.seed = 8;
  EXPECT_NE(RunExperiment(c, t).outputs, a.outputs);
}

TEST(RunExperiment, QOverrideKeepsFullBudget) {
  ExperimentConfig c = SmallConfig(MechanismChoice::kBrdp);
  c.q = 0.5;
  c.compose = false;
  const AcceptanceReport a = RunExperiment(c, LoadDataset(c.dataset));
  EXPECT_TRUE(a.params.q_overridden);
  EXPECT_EQ(a.params.q, 0.5);
  EXPECT_EQ(a.params.epsilon_y, c.budget.epsilon);
  EXPECT_FALSE(a.warnings.empty());
}

}  // namespace
}  // namespace brdp
