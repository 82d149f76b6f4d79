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

#ifndef BRDP_REPORT_H_
#define BRDP_REPORT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace brdp {

// Every parameter needed to rebuild the released mechanism.
struct ResolvedParameters {
  std::string mechanism;
  std::string kernel;
  std::string query;
  double epsilon = 0;
  double delta = 0;
  double theta = 0;
  double sensitivity = 0;
  double epsilon_y = 0;
  double delta_y = 0;
  double q = 0;
  bool q_overridden = false;
  double scale = 0;
  double W = 0;
  double L = 0;
  double p = 1;
  double sigma_e = 0;
  double inner_epsilon = 0;
  double inner_delta = 0;
  double kernel_sensitivity = 0;

  friend bool operator==(const ResolvedParameters&,
                         const ResolvedParameters&) = default;
};

struct ComposedLeakage {
  double delta = 0;
  std::optional<double> epsilon;  // null when the bracket search failed

  friend bool operator==(const ComposedLeakage&,
                         const ComposedLeakage&) = default;
};

struct AcceptanceReport {
  ResolvedParameters params;
  int trials = 0;
  int partitions = 0;
  std::uint64_t seed = 0;
  std::int64_t releases = 0;
  std::int64_t accepted = 0;
  double empirical_acceptance = 0;
  double standard_error = 0;
  double analytic_acceptance = 0;
  std::optional<double> end_to_end_acceptance;
  double mean_rounds = 0;
  int composed_T = 0;
  std::vector<ComposedLeakage> composed;
  std::vector<double> outputs;  // released values, mean-centred per partition
  std::vector<std::string> warnings;
  std::optional<double> runtime_seconds;

  friend bool operator==(const AcceptanceReport&,
                         const AcceptanceReport&) = default;
};

inline constexpr double kBoxQuantiles[] = {0.025, 0.25, 0.5, 0.75, 0.975};

// Type-7 (linear interpolation) sample quantiles; empty when xs is empty.
std::vector<double> Quantiles(std::vector<double> xs,
                              const std::vector<double>& probs);

enum class ReportFormat { kJson, kCsv };

ReportFormat ParseReportFormat(std::string_view name);

nlohmann::ordered_json ReportToJson(const AcceptanceReport& report);
AcceptanceReport ReportFromJson(const nlohmann::json& json);

void EmitReport(const AcceptanceReport& report, ReportFormat format,
                std::ostream& out);

// Throws kIo when the file cannot be written.
void EmitReport(const AcceptanceReport& report, ReportFormat format,
                const std::string& path);

}  // namespace brdp

#endif  // BRDP_REPORT_H_
