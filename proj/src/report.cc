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

#include "brdp/report.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "brdp/errors.h"

namespace brdp {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <typename T>
ordered_json Nullable(const std::optional<T>& value) {
  return value ? ordered_json(*value) : ordered_json(nullptr);
}

std::optional<double> OptionalDouble(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string QuantileName(double prob) {
  std::ostringstream name;
  name << "q" << prob * 100;
  return name.str();
}

// Shortest round-trip text for a double, matching the JSON writer.
std::string Number(double x) { return ordered_json(x).dump(); }

}  // namespace

std::vector<double> Quantiles(std::vector<double> xs,
                              const std::vector<double>& probs) {
  if (xs.empty()) return {};
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  out.reserve(probs.size());
  const double last = static_cast<double>(xs.size() - 1);
  for (double prob : probs) {
    const double h = last * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    out.push_back(xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]));
  }
  return out;
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  Fail(ErrorCategory::kDomain, "unknown report format '" + std::string(name) +
                                   "'");
}

ordered_json ReportToJson(const AcceptanceReport& r) {
  const ResolvedParameters& p = r.params;
  ordered_json params = {
      {"mechanism", p.mechanism},
      {"kernel", p.kernel},
      {"query", p.query},
      {"epsilon", p.epsilon},
      {"delta", p.delta},
      {"theta", p.theta},
      {"sensitivity", p.sensitivity},
      {"epsilon_y", p.epsilon_y},
      {"delta_y", p.delta_y},
      {"q", p.q},
      {"q_overridden", p.q_overridden},
      {"scale", p.scale},
      {"W", p.W},
      {"L", std::isinf(p.L) ? ordered_json(nullptr) : ordered_json(p.L)},
      {"p", p.p},
      {"sigma_e", p.sigma_e},
      {"inner_epsilon", p.inner_epsilon},
      {"inner_delta", p.inner_delta},
      {"kernel_sensitivity", p.kernel_sensitivity},
  };
  ordered_json composed = ordered_json::array();
  for (const ComposedLeakage& c : r.composed) {
    composed.push_back({{"delta", c.delta}, {"epsilon", Nullable(c.epsilon)}});
  }
  const std::vector<double> probs(std::begin(kBoxQuantiles),
                                  std::end(kBoxQuantiles));
  const std::vector<double> qs = Quantiles(r.outputs, probs);
  ordered_json quantiles = ordered_json::object();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    quantiles[QuantileName(probs[i])] =
        qs.empty() ? ordered_json(nullptr) : ordered_json(qs[i]);
  }
  ordered_json out = {
      {"parameters", params},
      {"trials", r.trials},
      {"partitions", r.partitions},
      {"seed", r.seed},
      {"releases", r.releases},
      {"accepted", r.accepted},
      {"empirical_acceptance", r.empirical_acceptance},
      {"standard_error", r.standard_error},
      {"analytic_acceptance", r.analytic_acceptance},
      {"end_to_end_acceptance", Nullable(r.end_to_end_acceptance)},
      {"mean_rounds", r.mean_rounds},
      {"composed_T", r.composed_T},
      {"composed", composed},
      {"quantiles", quantiles},
      {"warnings", r.warnings},
      {"runtime_seconds", Nullable(r.runtime_seconds)},
      {"outputs", r.outputs},
  };
  return out;
}

AcceptanceReport ReportFromJson(const json& j) {
  try {
    AcceptanceReport r;
    const json& p = j.at("parameters");
    ResolvedParameters& rp = r.params;
    rp.mechanism = p.at("mechanism").get<std::string>();
    rp.kernel = p.at("kernel").get<std::string>();
    rp.query = p.at("query").get<std::string>();
    rp.epsilon = p.at("epsilon").get<double>();
    rp.delta = p.at("delta").get<double>();
    rp.theta = p.at("theta").get<double>();
    rp.sensitivity = p.at("sensitivity").get<double>();
    rp.epsilon_y = p.at("epsilon_y").get<double>();
    rp.delta_y = p.at("delta_y").get<double>();
    rp.q = p.at("q").get<double>();
    rp.q_overridden = p.at("q_overridden").get<bool>();
    rp.scale = p.at("scale").get<double>();
    rp.W = p.at("W").get<double>();
    rp.L = p.at("L").is_null() ? INFINITY : p.at("L").get<double>();
    rp.p = p.at("p").get<double>();
    rp.sigma_e = p.at("sigma_e").get<double>();
    rp.inner_epsilon = p.at("inner_epsilon").get<double>();
    rp.inner_delta = p.at("inner_delta").get<double>();
    rp.kernel_sensitivity = p.at("kernel_sensitivity").get<double>();
    r.trials = j.at("trials").get<int>();
    r.partitions = j.at("partitions").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.releases = j.at("releases").get<std::int64_t>();
    r.accepted = j.at("accepted").get<std::int64_t>();
    r.empirical_acceptance = j.at("empirical_acceptance").get<double>();
    r.standard_error = j.at("standard_error").get<double>();
    r.analytic_acceptance = j.at("analytic_acceptance").get<double>();
    r.end_to_end_acceptance = OptionalDouble(j, "end_to_end_acceptance");
    r.mean_rounds = j.at("mean_rounds").get<double>();
    r.composed_T = j.at("composed_T").get<int>();
    for (const json& c : j.at("composed")) {
      r.composed.push_back(
          {c.at("delta").get<double>(), OptionalDouble(c, "epsilon")});
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.runtime_seconds = OptionalDouble(j, "runtime_seconds");
    r.outputs = j.at("outputs").get<std::vector<double>>();
    return r;
  } catch (const json::exception& e) {
    Fail(ErrorCategory::kSchema, std::string("malformed report: ") + e.what());
  }
}

void EmitReport(const AcceptanceReport& report, ReportFormat format,
                std::ostream& out) {
  const ordered_json j = ReportToJson(report);
  if (format == ReportFormat::kJson) {
    out << j.dump(2) << '\n';
    return;
  }
  // Long format: one (section, key, value) row per scalar.
  out << "section,key,value\n";
  auto scalar = [](const ordered_json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  for (const auto& [key, value] : j.at("parameters").items()) {
    out << "parameters," << key << ',' << scalar(value) << '\n';
  }
  for (const char* key :
       {"trials", "partitions", "seed", "releases", "accepted",
        "empirical_acceptance", "standard_error", "analytic_acceptance",
        "end_to_end_acceptance", "mean_rounds", "composed_T",
        "runtime_seconds"}) {
    out << "summary," << key << ',' << scalar(j.at(key)) << '\n';
  }
  for (const ComposedLeakage& c : report.composed) {
    out << "composed,epsilon_at_delta_" << Number(c.delta) << ','
        << (c.epsilon ? Number(*c.epsilon) : "null") << '\n';
  }
  for (const auto& [key, value] : j.at("quantiles").items()) {
    out << "quantiles," << key << ',' << scalar(value) << '\n';
  }
  for (std::size_t i = 0; i < report.warnings.size(); ++i) {
    out << "warnings," << i << ",\"" << report.warnings[i] << "\"\n";
  }
  for (std::size_t i = 0; i < report.outputs.size(); ++i) {
    out << "outputs," << i << ',' << Number(report.outputs[i]) << '\n';
  }
}

void EmitReport(const AcceptanceReport& report, ReportFormat format,
                const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) Fail(ErrorCategory::kIo, "cannot open '" + path + "' for writing");
  EmitReport(report, format, file);
  file.flush();
  if (!file) Fail(ErrorCategory::kIo, "failed writing '" + path + "'");
}

}  // namespace brdp
