#pragma once

// Measurement files and CSV tables.
//
// Measurement file: one sensor per line, whitespace separated,
//   2-D: x y azimuth
//   3-D: x y z azimuth elevation
// Blank lines and lines starting with '#' are ignored. Angles are radians
// unless read with `degrees`.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "aoa/harness.hpp"

namespace aoa::io {

struct MeasurementFile {
  int dim = 2;
  std::vector<mc::Coords> sensors;
  MeasurementSet meas;
};

// Throws Error(kUsage) with "line L, column C: ..." on malformed input.
MeasurementFile parse_measurements(std::string_view text, int dim, bool degrees = false);

// Writes angles in radians with round-trip precision.
std::string format_measurements(const MeasurementFile& file);

// RFC 4180 field quoting: fields with comma, quote, CR or LF are quoted.
std::string csv_field(std::string_view field);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

inline constexpr std::string_view kCampaignHeader =
    "scenario,n,estimator,bias,rmse,rcrlb,runs,failures,seed";

void write_campaign_csv(std::ostream& os, const std::vector<mc::McSummary>& summaries);

// One row per run: scenario,n,estimator,run,seed,ok,c0[,c1[,c2]],error
void write_runs_csv(std::ostream& os, const std::vector<mc::McSummary>& summaries);

inline constexpr std::string_view kBenchHeader = "scenario,n,estimator,median_seconds,ratio";

void write_bench_csv(std::ostream& os, const std::vector<mc::BenchRow>& rows);

// Parses a CSV document into rows of fields (RFC 4180 quoting).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace aoa::io
