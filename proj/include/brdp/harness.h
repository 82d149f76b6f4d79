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

#ifndef BRDP_HARNESS_H_
#define BRDP_HARNESS_H_

#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brdp/report.h"
#include "brdp/subsampling.h"
#include "json.hpp"

namespace brdp {

struct DatasetTable {
  std::vector<std::string> ids;
  std::vector<double> values;  // clamped into [clip_lo, clip_hi]
  std::string id_column;
  std::string value_column;
  double clip_lo = 0;
  double clip_hi = 1;
  std::int64_t dropped = 0;  // rows removed as not available

  std::size_t size() const { return values.size(); }
};

// Comma-separated with a header row. An empty id_column numbers the rows.
DatasetTable IngestCsv(std::istream& in, const std::string& id_column,
                       const std::string& value_column, double clip_lo,
                       double clip_hi);
DatasetTable IngestCsv(const std::string& path, const std::string& id_column,
                       const std::string& value_column, double clip_lo,
                       double clip_hi);

// Gaussian records N(mu, sigma^2), clamped, ids "0".."size-1".
DatasetTable SyntheticTable(std::int64_t size, double mu, double sigma,
                            double clip_lo, double clip_hi,
                            std::uint64_t seed);

// Count membership: the open interval (lo, hi).
struct Predicate {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool Contains(double x) const { return x > lo && x < hi; }
};

double RunQuery(std::span<const double> values, QueryKind kind,
                const Predicate& predicate = {});
double RunQuery(const DatasetTable& table, QueryKind kind,
                const Predicate& predicate = {});

// Bernoulli(p) subsample and the scaled estimator |X| / |X_s| Q(X_s). Empty
// subsamples are redrawn up to max_resamples times, then kEmptyDataset.
double RunSubsampledQuery(std::span<const double> values, QueryKind kind,
                          const Predicate& predicate, double p, Rng& rng,
                          int max_resamples = 100);

// Counter-based seed for an independent stream per (a, b).
std::uint64_t SubstreamSeed(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b);

enum class MechanismChoice { kDp, kBrdp, kSubsampledBrdp };

std::string_view MechanismName(MechanismChoice choice);
MechanismChoice ParseMechanismChoice(std::string_view name);

struct DatasetSource {
  std::string csv_path;  // empty selects the synthetic table
  std::string id_column;
  std::string value_column = "value";
  double clip_lo = 0;
  double clip_hi = 22;
  std::int64_t synthetic_size = 10000;
  double synthetic_mu = 11;
  double synthetic_sigma = 10;
  std::uint64_t synthetic_seed = 1;
};

struct ExperimentConfig {
  MechanismChoice mechanism = MechanismChoice::kBrdp;
  KernelKind kernel = KernelKind::kGaussian;
  BudgetPair budget{1, 1e-5};
  double theta = 1;
  QueryKind query = QueryKind::kSum;
  Predicate predicate;
  int trials = 1000;
  int partitions = 1;
  std::uint64_t seed = 0;
  double tol = 1e-4;
  std::optional<double> q;            // override of the allocated q
  std::optional<double> sensitivity;  // override of the clip-derived value
  ObjectiveMode mode = ObjectiveMode::kReciprocal;
  SensitivityScaling scaling = SensitivityScaling::kInverseProbability;
  std::vector<double> report_deltas = {1e-5};
  bool compose = true;
  bool timing = false;
  DatasetSource dataset;
};

// Missing keys keep their defaults; unknown keys throw kSchema.
ExperimentConfig ParseExperimentConfig(const nlohmann::json& json);
nlohmann::ordered_json ConfigToJson(const ExperimentConfig& config);

DatasetTable LoadDataset(const DatasetSource& source);

// Clip-derived sensitivity; Average divides by the smallest partition size.
double QuerySensitivity(const DatasetTable& table, QueryKind kind,
                        std::size_t smallest_partition);

AcceptanceReport RunExperiment(const ExperimentConfig& config,
                               const DatasetTable& table);

}  // namespace brdp

#endif  // BRDP_HARNESS_H_
