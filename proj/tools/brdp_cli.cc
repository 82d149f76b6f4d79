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

// Command-line front end. Every subcommand resolves its inputs from an
// optional JSON config overlaid by command-line flags, runs one library
// operation, and writes a JSON or CSV document to stdout or --out.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "brdp/composition.h"
#include "brdp/harness.h"
#include "json.hpp"

namespace {

using brdp::ErrorCategory;
using brdp::Fail;
using nlohmann::json;
using nlohmann::ordered_json;

struct Flags {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::string> mechanism;
  std::optional<std::string> kernel;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> theta;
  std::optional<double> sensitivity;
  std::optional<double> q;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> query;
  std::optional<std::string> csv;
  // Subcommand-specific inputs.
  double value = 0;
  std::int64_t population = 10000;
  double mu = 0;
  double sigma_x = 1;
  double p_c = 0.5;
  std::optional<double> rate;
};

json LoadConfig(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream file(path);
  if (!file) Fail(ErrorCategory::kIo, "cannot open config '" + path + "'");
  try {
    json j = json::parse(file);
    if (!j.is_object()) Fail(ErrorCategory::kSchema, "config must be an object");
    return j;
  } catch (const json::parse_error& e) {
    Fail(ErrorCategory::kSchema, std::string("config parse error: ") + e.what());
  }
}

// Config values first, then every flag that was given on the command line.
brdp::ExperimentConfig Resolve(const Flags& f) {
  json j = LoadConfig(f.config_path);
  auto set = [&](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  set("mechanism", f.mechanism);
  set("kernel", f.kernel);
  set("epsilon", f.epsilon);
  set("delta", f.delta);
  set("theta", f.theta);
  set("sensitivity", f.sensitivity);
  set("q", f.q);
  set("trials", f.trials);
  set("seed", f.seed);
  set("tol", f.tol);
  set("query", f.query);
  if (f.csv) {
    if (!j.contains("dataset") || j["dataset"].is_null()) {
      j["dataset"] = json::object();
    }
    j["dataset"]["csv"] = *f.csv;
  }
  brdp::ExperimentConfig c = brdp::ParseExperimentConfig(j);
  c.budget.Validate();
  return c;
}

double Sensitivity(const brdp::ExperimentConfig& c) {
  return c.sensitivity.value_or(1.0);
}

// Flattens nested objects into dotted keys for the CSV format.
void Flatten(const ordered_json& j, const std::string& prefix,
             std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      Flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      Flatten(j[i], prefix + "." + std::to_string(i), out);
    }
  } else {
    out << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump())
        << '\n';
  }
}

void Write(const ordered_json& doc, const Flags& f) {
  const brdp::ReportFormat format = brdp::ParseReportFormat(f.format);
  std::ostringstream text;
  if (format == brdp::ReportFormat::kJson) {
    text << doc.dump(2) << '\n';
  } else {
    text << "key,value\n";
    Flatten(doc, "", text);
  }
  if (f.out_path.empty()) {
    std::cout << text.str();
    return;
  }
  std::ofstream file(f.out_path, std::ios::binary);
  if (!file) Fail(ErrorCategory::kIo, "cannot open '" + f.out_path + "'");
  file << text.str();
  if (!file) Fail(ErrorCategory::kIo, "failed writing '" + f.out_path + "'");
}

ordered_json Nullable(double x) {
  return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

ordered_json MechanismJson(const brdp::BrdpMechanism& m) {
  const brdp::ShiftWeight s = brdp::ShiftParams(m.kernel, m.bound, m.q);
  return {{"kernel", brdp::KernelName(m.kernel.kind)},
          {"scale", m.kernel.scale},
          {"sensitivity", m.kernel.sensitivity},
          {"theta", m.bound.theta},
          {"q", m.q},
          {"W", s.W},
          {"L", Nullable(s.L)},
          {"p_theta", brdp::PTheta(m.kernel, m.bound.theta)},
          {"acceptance", brdp::AcceptanceRate(m)}};
}

// Mechanism for single-query subcommands: an explicit q keeps the kernel at
// the full budget, otherwise the budget is allocated.
brdp::BrdpMechanism BuildMechanism(const brdp::ExperimentConfig& c,
                                   ordered_json* doc) {
  if (c.q) {
    (*doc)["q_overridden"] = true;
    return brdp::MakeMechanism(
        brdp::Calibrate(c.kernel, c.budget, Sensitivity(c)), *c.q, c.theta);
  }
  brdp::AllocationOptions opt;
  opt.kind = c.kernel;
  opt.tol = c.tol;
  opt.mode = c.mode;
  const brdp::AllocationResult a =
      brdp::Allocate(c.budget, Sensitivity(c), c.theta, opt);
  (*doc)["q_overridden"] = false;
  (*doc)["epsilon_y"] = a.epsilon_y;
  (*doc)["delta_y"] = a.delta_y;
  return a.mechanism();
}

ordered_json Inputs(const brdp::ExperimentConfig& c) {
  return {{"kernel", brdp::KernelName(c.kernel)},
          {"epsilon", c.budget.epsilon},
          {"delta", c.budget.delta},
          {"theta", c.theta},
          {"sensitivity", Sensitivity(c)}};
}

ordered_json Calibrate(const Flags& f) {
  const brdp::ExperimentConfig c = Resolve(f);
  const brdp::CalibratedKernel k =
      brdp::Calibrate(c.kernel, c.budget, Sensitivity(c));
  ordered_json doc = Inputs(c);
  doc.erase("theta");
  doc["scale"] = k.scale;
  doc["profile_at_epsilon"] = brdp::PrivacyProfile(k, c.budget.epsilon);
  return doc;
}

ordered_json Allocate(const Flags& f) {
  const brdp::ExperimentConfig c = Resolve(f);
  brdp::AllocationOptions opt;
  opt.kind = c.kernel;
  opt.tol = c.tol;
  opt.mode = c.mode;
  const brdp::AllocationResult a =
      brdp::Allocate(c.budget, Sensitivity(c), c.theta, opt);
  const brdp::BrdpMechanism dp = brdp::MakeMechanism(
      brdp::Calibrate(c.kernel, c.budget, Sensitivity(c)), 0, c.theta);
  ordered_json doc = Inputs(c);
  doc["epsilon_y"] = a.epsilon_y;
  doc["delta_y"] = a.delta_y;
  doc["objective"] = a.objective_value;
  doc["mechanism"] = MechanismJson(a.mechanism());
  doc["dp_acceptance"] = brdp::AcceptanceRate(dp);
  doc["profile_at_epsilon"] =
      brdp::BrdpPrivacyProfile(a.mechanism(), c.budget.epsilon);
  return doc;
}

ordered_json Sample(const Flags& f) {
  const brdp::ExperimentConfig c = Resolve(f);
  ordered_json doc = Inputs(c);
  const brdp::BrdpMechanism m = BuildMechanism(c, &doc);
  doc["mechanism"] = MechanismJson(m);
  doc["true_value"] = f.value;
  doc["seed"] = c.seed;
  ordered_json values = ordered_json::array();
  ordered_json rounds = ordered_json::array();
  for (int t = 0; t < c.trials; ++t) {
    brdp::Rng rng(brdp::SubstreamSeed(c.seed, 0, static_cast<std::uint64_t>(t)));
    const brdp::Release r = brdp::Sample(m, f.value, rng);
    values.push_back(r.value);
    rounds.push_back(r.rounds);
  }
  doc["releases"] = values;
  doc["rounds"] = rounds;
  return doc;
}

ordered_json AcceptRate(const Flags& f) {
  const brdp::ExperimentConfig c = Resolve(f);
  ordered_json doc = Inputs(c);
  const brdp::BrdpMechanism m = BuildMechanism(c, &doc);
  doc["mechanism"] = MechanismJson(m);
  doc["acceptance"] = brdp::AcceptanceRate(m);
  doc["expected_rounds"] =
      1 / (1 - brdp::BarPTheta(m.kernel, m.bound.theta) * m.q);
  return doc;
}

ordered_json Compose(const Flags& f) {
  const brdp::ExperimentConfig c = Resolve(f);
  const int T = c.trials;
  ordered_json doc = Inputs(c);
  doc["T"] = T;
  const brdp::BrdpMechanism m = BuildMechanism(c, &doc);
  doc["mechanism"] = MechanismJson(m);
  const brdp::CalibratedKernel dp_kernel =
      brdp::Calibrate(c.kernel, c.budget, Sensitivity(c));
  const brdp::ComposedKernelProfile brdp_kernel(m.kernel, T);
  const brdp::ComposedKernelProfile dp_profile(dp_kernel, T);
  auto brdp_fn = [&](double e) { return brdp::BrdpProfileT(m, e, brdp_kernel); };
  auto dp_fn = [&](double e) { return dp_profile(e); };
  auto at = [](const std::function<double(double)>& fn, double d) {
    try {
      return ordered_json(brdp::EpsilonAtDelta(fn, d));
    } catch (const brdp::Error& e) {
      if (e.category() != ErrorCategory::kBracket) throw;
      return ordered_json(nullptr);
    }
  };
  ordered_json rows = ordered_json::array();
  for (double d : c.report_deltas) {
    rows.push_back({{"delta", d},
                    {"brdp_epsilon", at(brdp_fn, d)},
                    {"dp_epsilon", at(dp_fn, d)}});
  }
  doc["composed"] = rows;
  const brdp::BudgetPair basic = brdp::BasicComposition(c.budget, T);
  doc["basic"] = {{"epsilon", basic.epsilon}, {"delta", basic.delta}};
  if (c.budget.delta > 0 && c.budget.delta < 1) {
    doc["advanced_epsilon"] = brdp::AdvancedComposition(c.budget, T);
  }
  return doc;
}

ordered_json SubsampleOpt(const Flags& f) {
  const brdp::ExperimentConfig c = Resolve(f);
  brdp::PopulationModel pop;
  pop.size = f.population;
  pop.mu = f.mu;
  pop.sigma_x = f.sigma_x;
  pop.p_c = f.p_c;
  brdp::SubsamplingOptions opt;
  opt.allocation_tol = c.tol;
  opt.mode = c.mode;
  opt.scaling = c.scaling;
  const brdp::SubsampledResult r =
      f.rate ? brdp::PlanAtRate(c.budget, Sensitivity(c), c.theta, c.query,
                                pop, *f.rate, opt)
             : brdp::FindP(c.budget, Sensitivity(c), c.theta, c.query, pop, opt);
  ordered_json doc = Inputs(c);
  doc["query"] = brdp::QueryName(c.query);
  doc["population"] = {{"size", pop.size},
                       {"mu", pop.mu},
                       {"sigma_x", pop.sigma_x},
                       {"p_c", pop.p_c}};
  doc["p"] = r.plan.p;
  doc["inner_epsilon"] = r.plan.inner_budget.epsilon;
  doc["inner_delta"] = r.plan.inner_budget.delta;
  doc["sigma_e"] = r.plan.sigma_e;
  doc["kernel_sensitivity"] = r.plan.sensitivity;
  doc["epsilon_y"] = r.allocation.epsilon_y;
  doc["mechanism"] = MechanismJson(r.allocation.mechanism());
  doc["acceptance"] = r.acceptance;
  doc["warnings"] = r.plan.warnings;
  return doc;
}

void Experiment(const Flags& f) {
  const brdp::ExperimentConfig c = Resolve(f);
  const brdp::DatasetTable table = brdp::LoadDataset(c.dataset);
  const brdp::AcceptanceReport report = brdp::RunExperiment(c, table);
  const brdp::ReportFormat format = brdp::ParseReportFormat(f.format);
  if (f.out_path.empty()) {
    brdp::EmitReport(report, format, std::cout);
  } else {
    brdp::EmitReport(report, format, f.out_path);
  }
}

void AddCommon(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON config file");
  app->add_option("--out", f.out_path, "output path (default stdout)");
  app->add_option("--format", f.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--kernel", f.kernel, "noise kernel")
      ->check(CLI::IsMember({"gaussian", "laplace"}));
  app->add_option("--epsilon", f.epsilon, "total epsilon");
  app->add_option("--delta", f.delta, "total delta (default 1e-5)");
  app->add_option("--theta", f.theta, "error bound");
  app->add_option("--sensitivity", f.sensitivity, "query sensitivity");
  app->add_option("--q", f.q, "recycling probability override");
  app->add_option("--trials", f.trials, "trials, draws or compositions");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--tol", f.tol, "search tolerance");
}

int Report(const brdp::Error& e) {
  const ordered_json err = {
      {"error",
       {{"category", brdp::CategoryName(e.category())}, {"message", e.what()}}}};
  std::cerr << err.dump() << '\n';
  return brdp::ExitCode(e.category());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded-recycling noisy release: calibration, accounting and "
               "experiments"};
  app.require_subcommand(1);
  Flags f;

  auto* calibrate = app.add_subcommand("calibrate", "calibrate a noise kernel");
  auto* allocate = app.add_subcommand("allocate", "split the budget and pick q");
  auto* sample = app.add_subcommand("sample", "draw releases");
  sample->add_option("--value", f.value, "true query answer");
  auto* accept = app.add_subcommand("accept-rate", "analytic acceptance rate");
  auto* compose =
      app.add_subcommand("compose", "composed leakage over --trials releases");
  auto* subsample =
      app.add_subcommand("subsample-opt", "choose the subsampling rate");
  subsample->add_option("--query", f.query, "sum, average or count");
  subsample->add_option("--population", f.population, "population size");
  subsample->add_option("--mu", f.mu, "population mean");
  subsample->add_option("--sigma-x", f.sigma_x, "population std");
  subsample->add_option("--pc", f.p_c, "count predicate probability");
  subsample->add_option("--rate", f.rate, "fixed rate instead of a search");
  auto* experiment = app.add_subcommand("experiment", "run an experiment");
  experiment->add_option("--mechanism", f.mechanism,
                         "dp, brdp or subsampled-brdp");
  experiment->add_option("--query", f.query, "sum, average or count");
  experiment->add_option("--csv", f.csv, "dataset CSV path");
  for (CLI::App* sub :
       {calibrate, allocate, sample, accept, compose, subsample, experiment}) {
    AddCommon(sub, f);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help prints and exits 0; every other parse failure is a usage error.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*experiment) {
      Experiment(f);
      return 0;
    }
    ordered_json doc;
    if (*calibrate) doc = Calibrate(f);
    if (*allocate) doc = Allocate(f);
    if (*sample) doc = Sample(f);
    if (*accept) doc = AcceptRate(f);
    if (*compose) doc = Compose(f);
    if (*subsample) doc = SubsampleOpt(f);
    Write(doc, f);
  } catch (const brdp::Error& e) {
    return Report(e);
  } catch (const std::exception& e) {
    return Report(brdp::Error(ErrorCategory::kSchema, e.what()));
  }
  return 0;
}
