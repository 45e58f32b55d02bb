#pragma once

// JSON campaign configuration: scenarios, output options and optional
// threshold checks, plus the compiled-in presets. See docs/config.md.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoa/harness.hpp"

namespace aoa::config {

struct OutputOptions {
  std::optional<std::string> csv;        // campaign CSV path
  std::optional<std::string> runs_dump;  // per-run CSV path
  friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

enum class CheckKind {
  kRatio,  // rmse / rcrlb of one cell
  kRmse,   // rmse of one cell
  kSlope,  // slope_check over the scenario's n sweep
};

std::string_view to_string(CheckKind kind);

struct Check {
  std::string scenario;
  CheckKind kind = CheckKind::kRatio;
  mc::EstimatorKind estimator = mc::EstimatorKind::kBelsGn;
  std::optional<std::size_t> n;  // defaults to the largest n (ratio, rmse)
  std::optional<double> min;
  std::optional<double> max;
  friend bool operator==(const Check&, const Check&) = default;
};

struct ConfigDocument {
  std::vector<mc::Scenario> scenarios;
  OutputOptions output;
  std::vector<Check> checks;
  friend bool operator==(const ConfigDocument&, const ConfigDocument&) = default;
};

// Throws Error(kUsage) whose message starts with the JSON pointer of the
// offending value. Unknown keys are rejected.
ConfigDocument parse_config(std::string_view text);
std::string serialize_config(const ConfigDocument& doc);

std::vector<std::string> preset_names();
// Throws Error(kUsage) for an unknown name.
ConfigDocument preset(std::string_view name);

struct CheckResult {
  Check check;
  double value = 0.0;  // NaN when the cell is missing or invalid
  bool passed = false;
  std::string label;
};

std::vector<CheckResult> evaluate_checks(const std::vector<Check>& checks,
                                         const std::vector<mc::McSummary>& summaries);

}  // namespace aoa::config
