#pragma once

// Monte Carlo campaigns over scenario cells (scenario, n, estimator), with the
// bias/RMSE metrics and the root-CRLB benchmark line.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aoa/model.hpp"

namespace aoa::mc {

using Coords = std::vector<double>;

enum class EstimatorKind {
  kPls,
  kBels,         // known sigma
  kBelsGn,       // known sigma, one Gauss-Newton step
  kBelsVhat,     // data-driven sine variance
  kBelsVhatGn,
  kVhatA,        // azimuth sine-variance estimate itself
  kVhatE,        // elevation sine-variance estimate (3-D)
  kBelsZ,        // z coordinate of the known-sigma BELS estimate (3-D)
};

std::string_view to_string(EstimatorKind kind);
std::optional<EstimatorKind> parse_estimator(std::string_view name);
std::span<const EstimatorKind> all_estimators();

struct FixedArray {
  std::vector<Coords> sensors;
  friend bool operator==(const FixedArray&, const FixedArray&) = default;
};

// Fresh sensors each run, uniform on a horizontal circle.
struct RandomCircle {
  double radius = 0.0;
  Coords center;
  friend bool operator==(const RandomCircle&, const RandomCircle&) = default;
};

// Each site measured n / sites.size() times. Expanded round-major: sensor
// t * sites.size() + k is site k on round t.
struct Replicated {
  std::vector<Coords> sites;
  friend bool operator==(const Replicated&, const Replicated&) = default;
};

using ArraySpec = std::variant<FixedArray, RandomCircle, Replicated>;

struct Scenario {
  std::string name;
  int dim = 2;
  ArraySpec array;
  Coords source;
  NoiseModel noise;  // true noise; both sigmas known (sigma_e only in 3-D)
  std::vector<std::size_t> n_list;
  std::vector<EstimatorKind> estimators;
  std::size_t runs = 1;
  std::uint64_t base_seed = 0;

  // Throws Error(kUsage) naming the offending field.
  void validate() const;
  friend bool operator==(const Scenario& a, const Scenario& b);
};

struct Metrics {
  double bias = 0.0;  // sum of |mean estimate - truth| over coordinates
  double rmse = 0.0;  // sqrt(mean |estimate - truth|^2)
};

Metrics metrics(std::span<const Coords> estimates, std::span<const double> truth);

struct CellSummary {
  std::string scenario;
  std::size_t n = 0;
  EstimatorKind estimator = EstimatorKind::kPls;
  double bias = 0.0;
  double rmse = 0.0;
  double rcrlb = 0.0;  // NaN for sine-variance cells
  std::size_t runs_completed = 0;
  std::size_t runs_failed = 0;
  std::uint64_t base_seed = 0;
  std::uint64_t first_seed = 0;
  std::uint64_t last_seed = 0;

  // More than 1% failed runs invalidates the cell.
  bool valid() const { return runs_failed * 100 <= runs_completed + runs_failed; }
};

struct RunRecord {
  std::size_t n = 0;
  EstimatorKind estimator = EstimatorKind::kPls;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::optional<Coords> estimate;  // empty when the run failed
  std::string error;
};

struct McSummary {
  std::string scenario;
  std::vector<CellSummary> cells;
  std::vector<RunRecord> runs;  // filled only with CampaignOptions::keep_runs

  const CellSummary* find(std::size_t n, EstimatorKind kind) const;
};

struct CampaignOptions {
  std::size_t parallelism = 1;
  bool keep_runs = false;
};

// Deterministic in (scenario, base_seed) and independent of parallelism.
McSummary run_campaign(const Scenario& scenario, const CampaignOptions& options = {});

// Least-squares slope of log RMSE against log n over the cells of `kind`.
double slope_check(const McSummary& summary, EstimatorKind kind);

// Sensor positions used for sample size n in the run seeded `run_seed`.
std::vector<Coords> realize_sensors(const Scenario& scenario, std::size_t n,
                                    std::uint64_t run_seed);

// Estimates of every kind in `kinds` from one measurement set; failures are
// empty optionals with the message in `errors` (same index).
std::vector<std::optional<Coords>> evaluate_estimators(const Scenario& scenario,
                                                       std::span<const Coords> sensors,
                                                       const MeasurementSet& meas,
                                                       std::span<const EstimatorKind> kinds,
                                                       std::vector<std::string>* errors = nullptr);

// Synthesizes the measurement set for one run.
MeasurementSet synthesize_run(const Scenario& scenario, std::span<const Coords> sensors,
                              std::uint64_t run_seed);

struct BenchRow {
  std::string scenario;
  std::size_t n = 0;
  EstimatorKind estimator = EstimatorKind::kPls;
  double median_seconds = 0.0;
  double ratio_to_first = 1.0;  // median time over the smallest-n time
};

// Median of `repeats` timing samples per (n, estimator). Each sample is the
// mean over max(1, 100000 / n) evaluations on the run-0 measurement set.
std::vector<BenchRow> run_bench(const Scenario& scenario, int repeats = 5);

}  // namespace aoa::mc
