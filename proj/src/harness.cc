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

#include "brdp/harness.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "brdp/composition.h"

namespace brdp {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

// Splits one CSV line; double quotes protect commas.
std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      current += c;
    } else if (c == ',' && !quoted) {
      fields.push_back(Trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(Trim(current));
  return fields;
}

bool IsMissing(const std::string& s) {
  static const std::set<std::string> kMissing = {
      "", "NA", "N/A", "na", "n/a", "?", "nan", "NaN", "NAN", "null", "NULL"};
  return kMissing.count(s) > 0;
}

std::optional<double> ParseDouble(const std::string& s) {
  double value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void CheckClip(double lo, double hi) {
  if (!(lo < hi)) Fail(ErrorCategory::kDomain, "clip_lo must be below clip_hi");
}

template <typename T>
T Get(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    Fail(ErrorCategory::kSchema,
         std::string("config key '") + key + "': " + e.what());
  }
}

void RejectUnknown(const json& j, const std::set<std::string>& known,
                   const std::string& where) {
  if (!j.is_object()) Fail(ErrorCategory::kSchema, where + " must be an object");
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      Fail(ErrorCategory::kSchema,
           "unknown key '" + item.key() + "' in " + where);
    }
  }
}

double Bound(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return Get<double>(j, key, fallback);
}

}  // namespace

DatasetTable IngestCsv(std::istream& in, const std::string& id_column,
                       const std::string& value_column, double clip_lo,
                       double clip_hi) {
  CheckClip(clip_lo, clip_hi);
  std::string line;
  if (!std::getline(in, line)) {
    Fail(ErrorCategory::kSchema, "CSV input has no header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  const std::vector<std::string> header = SplitCsv(line);
  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      Fail(ErrorCategory::kSchema, "CSV has no column '" + name + "'");
    }
    return it - header.begin();
  };
  const std::ptrdiff_t value_index = column(value_column);
  const std::ptrdiff_t id_index = id_column.empty() ? -1 : column(id_column);

  DatasetTable table;
  table.id_column = id_column;
  table.value_column = value_column;
  table.clip_lo = clip_lo;
  table.clip_hi = clip_hi;
  std::int64_t row = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    const std::vector<std::string> fields = SplitCsv(line);
    const std::int64_t this_row = row++;
    const auto width = static_cast<std::ptrdiff_t>(fields.size());
    if (value_index >= width || id_index >= width ||
        IsMissing(fields[value_index])) {
      ++table.dropped;
      continue;
    }
    const std::optional<double> value = ParseDouble(fields[value_index]);
    if (!value) {
      ++table.dropped;
      continue;
    }
    table.ids.push_back(id_index < 0 ? std::to_string(this_row)
                                     : fields[id_index]);
    table.values.push_back(std::clamp(*value, clip_lo, clip_hi));
  }
  if (table.values.empty()) {
    Fail(ErrorCategory::kEmptyDataset, "no usable rows in CSV input");
  }
  return table;
}

DatasetTable IngestCsv(const std::string& path, const std::string& id_column,
                       const std::string& value_column, double clip_lo,
                       double clip_hi) {
  std::ifstream file(path, std::ios::binary);
  if (!file) Fail(ErrorCategory::kIo, "cannot open '" + path + "'");
  return IngestCsv(file, id_column, value_column, clip_lo, clip_hi);
}

DatasetTable SyntheticTable(std::int64_t size, double mu, double sigma,
                            double clip_lo, double clip_hi,
                            std::uint64_t seed) {
  CheckClip(clip_lo, clip_hi);
  if (size < 1) Fail(ErrorCategory::kEmptyDataset, "synthetic size must be >= 1");
  DatasetTable table;
  table.value_column = "value";
  table.clip_lo = clip_lo;
  table.clip_hi = clip_hi;
  Rng rng(seed);
  std::normal_distribution<double> normal(mu, sigma);
  table.ids.reserve(size);
  table.values.reserve(size);
  for (std::int64_t i = 0; i < size; ++i) {
    table.ids.push_back(std::to_string(i));
    table.values.push_back(std::clamp(normal(rng), clip_lo, clip_hi));
  }
  return table;
}

double RunQuery(std::span<const double> values, QueryKind kind,
                const Predicate& predicate) {
  if (values.empty()) Fail(ErrorCategory::kEmptyDataset, "query on no rows");
  switch (kind) {
    case QueryKind::kSum:
      return std::accumulate(values.begin(), values.end(), 0.0);
    case QueryKind::kAverage:
      return std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    case QueryKind::kCount:
      return static_cast<double>(std::count_if(
          values.begin(), values.end(),
          [&](double x) { return predicate.Contains(x); }));
  }
  return 0;
}

double RunQuery(const DatasetTable& table, QueryKind kind,
                const Predicate& predicate) {
  return RunQuery(std::span<const double>(table.values), kind, predicate);
}

double RunSubsampledQuery(std::span<const double> values, QueryKind kind,
                          const Predicate& predicate, double p, Rng& rng,
                          int max_resamples) {
  if (!(p > 0 && p <= 1)) {
    Fail(ErrorCategory::kDomain, "sampling rate p must lie in (0, 1]");
  }
  if (values.empty()) Fail(ErrorCategory::kEmptyDataset, "query on no rows");
  if (p == 1) return RunQuery(values, kind, predicate);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int attempt = 0; attempt <= max_resamples; ++attempt) {
    std::size_t kept = 0;
    double sum = 0;
    double hits = 0;
    for (double x : values) {
      if (uniform(rng) < p) {
        ++kept;
        sum += x;
        if (predicate.Contains(x)) hits += 1;
      }
    }
    if (kept == 0) continue;
    const double scale =
        static_cast<double>(values.size()) / static_cast<double>(kept);
    switch (kind) {
      case QueryKind::kSum:
        return scale * sum;
      case QueryKind::kAverage:
        return sum / static_cast<double>(kept);
      case QueryKind::kCount:
        return scale * hits;
    }
  }
  Fail(ErrorCategory::kEmptyDataset, "every subsample drawn was empty");
}

std::uint64_t SubstreamSeed(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

std::string_view MechanismName(MechanismChoice choice) {
  switch (choice) {
    case MechanismChoice::kDp:
      return "dp";
    case MechanismChoice::kBrdp:
      return "brdp";
    case MechanismChoice::kSubsampledBrdp:
      return "subsampled-brdp";
  }
  return "brdp";
}

MechanismChoice ParseMechanismChoice(std::string_view name) {
  if (name == "dp") return MechanismChoice::kDp;
  if (name == "brdp" || name == "br-dp") return MechanismChoice::kBrdp;
  if (name == "subsampled-brdp" || name == "subsampled") {
    return MechanismChoice::kSubsampledBrdp;
  }
  Fail(ErrorCategory::kDomain, "unknown mechanism '" + std::string(name) + "'");
}

ExperimentConfig ParseExperimentConfig(const json& j) {
  RejectUnknown(j,
                {"mechanism", "kernel", "epsilon", "delta", "theta", "query",
                 "predicate", "trials", "partitions", "seed", "tol", "q",
                 "sensitivity", "objective", "sensitivity_scaling",
                 "report_deltas", "compose", "timing", "dataset"},
                "config");
  ExperimentConfig c;
  c.mechanism = ParseMechanismChoice(
      Get<std::string>(j, "mechanism", std::string(MechanismName(c.mechanism))));
  c.kernel = ParseKernelKind(
      Get<std::string>(j, "kernel", std::string(KernelName(c.kernel))));
  c.budget.epsilon = Get<double>(j, "epsilon", c.budget.epsilon);
  c.budget.delta = Get<double>(j, "delta", c.budget.delta);
  c.theta = Get<double>(j, "theta", c.theta);
  c.query =
      ParseQueryKind(Get<std::string>(j, "query", std::string(QueryName(c.query))));
  if (j.contains("predicate") && !j.at("predicate").is_null()) {
    const json& p = j.at("predicate");
    RejectUnknown(p, {"lo", "hi"}, "predicate");
    c.predicate.lo = Bound(p, "lo", c.predicate.lo);
    c.predicate.hi = Bound(p, "hi", c.predicate.hi);
  }
  c.trials = Get<int>(j, "trials", c.trials);
  c.partitions = Get<int>(j, "partitions", c.partitions);
  c.seed = Get<std::uint64_t>(j, "seed", c.seed);
  c.tol = Get<double>(j, "tol", c.tol);
  if (j.contains("q") && !j.at("q").is_null()) c.q = Get<double>(j, "q", 0);
  if (j.contains("sensitivity") && !j.at("sensitivity").is_null()) {
    c.sensitivity = Get<double>(j, "sensitivity", 1);
  }
  const std::string objective = Get<std::string>(j, "objective", "reciprocal");
  if (objective == "reciprocal") {
    c.mode = ObjectiveMode::kReciprocal;
  } else if (objective == "literal") {
    c.mode = ObjectiveMode::kLiteral;
  } else {
    Fail(ErrorCategory::kSchema, "objective must be reciprocal or literal");
  }
  const std::string scaling =
      Get<std::string>(j, "sensitivity_scaling", "inverse-probability");
  if (scaling == "inverse-probability") {
    c.scaling = SensitivityScaling::kInverseProbability;
  } else if (scaling == "none") {
    c.scaling = SensitivityScaling::kNone;
  } else {
    Fail(ErrorCategory::kSchema,
         "sensitivity_scaling must be inverse-probability or none");
  }
  c.report_deltas = Get<std::vector<double>>(j, "report_deltas", c.report_deltas);
  c.compose = Get<bool>(j, "compose", c.compose);
  c.timing = Get<bool>(j, "timing", c.timing);
  if (j.contains("dataset") && !j.at("dataset").is_null()) {
    const json& d = j.at("dataset");
    RejectUnknown(d,
                  {"csv", "id_column", "value_column", "clip", "synthetic"},
                  "dataset");
    DatasetSource& s = c.dataset;
    s.csv_path = Get<std::string>(d, "csv", s.csv_path);
    s.id_column = Get<std::string>(d, "id_column", s.id_column);
    s.value_column = Get<std::string>(d, "value_column", s.value_column);
    if (d.contains("clip")) {
      const auto clip = Get<std::vector<double>>(d, "clip", {});
      if (clip.size() != 2) {
        Fail(ErrorCategory::kSchema, "dataset.clip must be [lo, hi]");
      }
      s.clip_lo = clip[0];
      s.clip_hi = clip[1];
    }
    if (d.contains("synthetic")) {
      const json& syn = d.at("synthetic");
      RejectUnknown(syn, {"size", "mu", "sigma", "seed"}, "dataset.synthetic");
      s.synthetic_size = Get<std::int64_t>(syn, "size", s.synthetic_size);
      s.synthetic_mu = Get<double>(syn, "mu", s.synthetic_mu);
      s.synthetic_sigma = Get<double>(syn, "sigma", s.synthetic_sigma);
      s.synthetic_seed = Get<std::uint64_t>(syn, "seed", s.synthetic_seed);
    }
  }
  return c;
}

ordered_json ConfigToJson(const ExperimentConfig& c) {
  auto bound = [](double x) {
    return std::isinf(x) ? ordered_json(nullptr) : ordered_json(x);
  };
  ordered_json dataset = {
      {"csv", c.dataset.csv_path},
      {"id_column", c.dataset.id_column},
      {"value_column", c.dataset.value_column},
      {"clip", {c.dataset.clip_lo, c.dataset.clip_hi}},
      {"synthetic",
       {{"size", c.dataset.synthetic_size},
        {"mu", c.dataset.synthetic_mu},
        {"sigma", c.dataset.synthetic_sigma},
        {"seed", c.dataset.synthetic_seed}}},
  };
  return {
      {"mechanism", MechanismName(c.mechanism)},
      {"kernel", KernelName(c.kernel)},
      {"epsilon", c.budget.epsilon},
      {"delta", c.budget.delta},
      {"theta", c.theta},
      {"query", QueryName(c.query)},
      {"predicate", {{"lo", bound(c.predicate.lo)}, {"hi", bound(c.predicate.hi)}}},
      {"trials", c.trials},
      {"partitions", c.partitions},
      {"seed", c.seed},
      {"tol", c.tol},
      {"q", c.q ? ordered_json(*c.q) : ordered_json(nullptr)},
      {"sensitivity",
       c.sensitivity ? ordered_json(*c.sensitivity) : ordered_json(nullptr)},
      {"objective", c.mode == ObjectiveMode::kReciprocal ? "reciprocal" : "literal"},
      {"sensitivity_scaling", c.scaling == SensitivityScaling::kNone
                                  ? "none"
                                  : "inverse-probability"},
      {"report_deltas", c.report_deltas},
      {"compose", c.compose},
      {"timing", c.timing},
      {"dataset", dataset},
  };
}

DatasetTable LoadDataset(const DatasetSource& source) {
  if (!source.csv_path.empty()) {
    return IngestCsv(source.csv_path, source.id_column, source.value_column,
                     source.clip_lo, source.clip_hi);
  }
  return SyntheticTable(source.synthetic_size, source.synthetic_mu,
                        source.synthetic_sigma, source.clip_lo, source.clip_hi,
                        source.synthetic_seed);
}

double QuerySensitivity(const DatasetTable& table, QueryKind kind,
                        std::size_t smallest_partition) {
  const double range = table.clip_hi - table.clip_lo;
  switch (kind) {
    case QueryKind::kSum:
      return range;
    case QueryKind::kAverage:
      return range / static_cast<double>(std::max<std::size_t>(1, smallest_partition));
    case QueryKind::kCount:
      return 1.0;
  }
  return range;
}

AcceptanceReport RunExperiment(const ExperimentConfig& config,
                               const DatasetTable& table) {
  const auto start = std::chrono::steady_clock::now();
  config.budget.Validate();
  if (config.trials < 1 || config.partitions < 1) {
    Fail(ErrorCategory::kDomain, "trials and partitions must be >= 1");
  }
  if (table.size() < static_cast<std::size_t>(config.partitions)) {
    Fail(ErrorCategory::kEmptyDataset, "fewer rows than partitions");
  }

  // Disjoint partitions: contiguous blocks after a stable sort by id.
  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.ids[a] < table.ids[b];
  });
  std::vector<std::vector<double>> parts(config.partitions);
  const std::size_t n = table.size();
  for (int j = 0; j < config.partitions; ++j) {
    const std::size_t begin = n * j / config.partitions;
    const std::size_t end = n * (j + 1) / config.partitions;
    for (std::size_t i = begin; i < end; ++i) {
      parts[j].push_back(table.values[order[i]]);
    }
  }
  std::size_t smallest = n;
  for (const auto& part : parts) smallest = std::min(smallest, part.size());

  AcceptanceReport report;
  ResolvedParameters& rp = report.params;
  rp.mechanism = std::string(MechanismName(config.mechanism));
  rp.kernel = std::string(KernelName(config.kernel));
  rp.query = std::string(QueryName(config.query));
  rp.epsilon = config.budget.epsilon;
  rp.delta = config.budget.delta;
  rp.theta = config.theta;
  rp.sensitivity = config.sensitivity.value_or(
      QuerySensitivity(table, config.query, smallest));
  rp.inner_epsilon = rp.epsilon;
  rp.inner_delta = rp.delta;
  rp.kernel_sensitivity = rp.sensitivity;

  AllocationOptions alloc;
  alloc.kind = config.kernel;
  alloc.tol = config.tol;
  alloc.mode = config.mode;

  BrdpMechanism mech;
  double p = 1;
  double sigma_e = 0;
  switch (config.mechanism) {
    case MechanismChoice::kDp: {
      if (config.q && *config.q != 0) {
        Fail(ErrorCategory::kDomain, "the dp mechanism has q = 0");
      }
      mech = MakeMechanism(Calibrate(config.kernel, config.budget, rp.sensitivity),
                           0.0, config.theta);
      rp.epsilon_y = rp.epsilon;
      rp.delta_y = rp.delta;
      report.analytic_acceptance = AcceptanceRate(mech);
      break;
    }
    case MechanismChoice::kBrdp: {
      if (config.q) {
        // The kernel keeps the full budget; q is taken as given.
        mech = MakeMechanism(
            Calibrate(config.kernel, config.budget, rp.sensitivity), *config.q,
            config.theta);
        rp.q_overridden = true;
        rp.epsilon_y = rp.epsilon;
        rp.delta_y = rp.delta;
        if (BrdpPrivacyProfile(mech, rp.epsilon) > rp.delta) {
          report.warnings.push_back(
              "q override exceeds the total budget at the total epsilon");
        }
      } else {
        const AllocationResult a =
            Allocate(config.budget, rp.sensitivity, config.theta, alloc);
        mech = a.mechanism();
        rp.epsilon_y = a.epsilon_y;
        rp.delta_y = a.delta_y;
      }
      report.analytic_acceptance = AcceptanceRate(mech);
      break;
    }
    case MechanismChoice::kSubsampledBrdp: {
      if (config.q) {
        Fail(ErrorCategory::kDomain,
             "q override is not supported for subsampled-brdp");
      }
      PopulationModel pop;
      pop.size = static_cast<std::int64_t>(smallest);
      pop.mu = RunQuery(table, QueryKind::kAverage);
      double var = 0;
      for (double x : table.values) var += (x - pop.mu) * (x - pop.mu);
      pop.sigma_x = std::sqrt(var / std::max<double>(1, n - 1.0));
      if (!(pop.sigma_x > 0)) pop.sigma_x = 1e-12;
      pop.p_c = RunQuery(table, QueryKind::kCount, config.predicate) /
                static_cast<double>(n);
      SubsamplingOptions sub;
      sub.allocation_tol = config.tol;
      sub.mode = config.mode;
      sub.scaling = config.scaling;
      // Laplace reuses the sampling rate planned for the Gaussian kernel.
      const SubsampledResult plan =
          FindP(config.budget, rp.sensitivity, config.theta, config.query, pop,
                sub);
      p = plan.plan.p;
      sigma_e = plan.plan.sigma_e;
      rp.inner_epsilon = plan.plan.inner_budget.epsilon;
      rp.inner_delta = plan.plan.inner_budget.delta;
      rp.kernel_sensitivity = plan.plan.sensitivity;
      report.warnings = plan.plan.warnings;
      if (config.kernel == KernelKind::kGaussian) {
        mech = plan.allocation.mechanism();
        rp.epsilon_y = plan.allocation.epsilon_y;
        rp.delta_y = plan.allocation.delta_y;
        report.analytic_acceptance = plan.acceptance;
      } else {
        const AllocationResult a = Allocate(plan.plan.inner_budget,
                                            plan.plan.sensitivity, config.theta,
                                            alloc);
        mech = a.mechanism();
        rp.epsilon_y = a.epsilon_y;
        rp.delta_y = a.delta_y;
        report.analytic_acceptance =
            MonteCarloAcceptance(mech, sigma_e, 10000, SubstreamSeed(config.seed, ~0ULL, 0));
      }
      report.end_to_end_acceptance = EndToEndAcceptance(mech, sigma_e);
      break;
    }
  }
  const ShiftWeight shift = ShiftParams(mech.kernel, mech.bound, mech.q);
  rp.q = mech.q;
  rp.scale = mech.kernel.scale;
  rp.W = shift.W;
  rp.L = shift.L;
  rp.p = p;
  rp.sigma_e = sigma_e;

  // Trials. Each (partition, trial) pair owns a derived random stream, so the
  // result does not depend on execution order.
  report.trials = config.trials;
  report.partitions = config.partitions;
  report.seed = config.seed;
  std::int64_t rounds = 0;
  for (int j = 0; j < config.partitions; ++j) {
    const std::span<const double> values(parts[j]);
    const double truth = RunQuery(values, config.query, config.predicate);
    std::vector<double> released;
    released.reserve(config.trials);
    for (int t = 0; t < config.trials; ++t) {
      Rng rng(SubstreamSeed(config.seed, static_cast<std::uint64_t>(j),
                            static_cast<std::uint64_t>(t)));
      double answer = truth;
      if (config.mechanism == MechanismChoice::kSubsampledBrdp) {
        answer = RunSubsampledQuery(values, config.query, config.predicate, p,
                                    rng);
      }
      const Release r = Sample(mech, answer, rng);
      rounds += r.rounds;
      ++report.releases;
      if (std::abs(r.value - truth) <= config.theta) ++report.accepted;
      released.push_back(r.value);
    }
    // Mean-centring for plotting only consumes released values.
    const double mean =
        std::accumulate(released.begin(), released.end(), 0.0) /
        static_cast<double>(released.size());
    for (double v : released) report.outputs.push_back(v - mean);
  }
  const double total = static_cast<double>(report.releases);
  report.empirical_acceptance = static_cast<double>(report.accepted) / total;
  report.standard_error = std::sqrt(
      report.empirical_acceptance * (1 - report.empirical_acceptance) / total);
  report.mean_rounds = static_cast<double>(rounds) / total;

  // Each partition is queried `trials` times; partitions are disjoint, so the
  // per-partition composition is the whole-dataset guarantee.
  if (config.compose) {
    report.composed_T = config.trials;
    std::function<double(double)> profile;
    if (config.mechanism == MechanismChoice::kSubsampledBrdp) {
      auto sub = std::make_shared<SubsampledProfileT>(mech, p, config.trials);
      profile = [sub](double e) { return (*sub)(e); };
    } else {
      auto kernel_profile =
          std::make_shared<ComposedKernelProfile>(mech.kernel, config.trials);
      profile = [kernel_profile, mech](double e) {
        return BrdpProfileT(mech, e, *kernel_profile);
      };
    }
    for (double d : config.report_deltas) {
      ComposedLeakage leak{d, std::nullopt};
      try {
        leak.epsilon = EpsilonAtDelta(profile, d);
      } catch (const Error& e) {
        if (e.category() != ErrorCategory::kBracket) throw;
        report.warnings.push_back("composed epsilon not bracketed at delta " +
                                  ordered_json(d).dump());
      }
      report.composed.push_back(leak);
    }
  }
  if (config.timing) {
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
  }
  return report;
}

}  // namespace brdp
