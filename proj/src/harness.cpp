#include "aoa/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <thread>

#include "aoa/crlb.hpp"
#include "aoa/estimator2d.hpp"
#include "aoa/estimator3d.hpp"
#include "aoa/rng.hpp"

namespace aoa::mc {

namespace {

constexpr std::array<EstimatorKind, 8> kAllKinds = {
    EstimatorKind::kPls,        EstimatorKind::kBels,  EstimatorKind::kBelsGn,
    EstimatorKind::kBelsVhat,   EstimatorKind::kBelsVhatGn, EstimatorKind::kVhatA,
    EstimatorKind::kVhatE,      EstimatorKind::kBelsZ,
};

[[noreturn]] void usage(const std::string& scenario, const std::string& message) {
  throw Error(ErrorKind::kUsage, "scenario '" + scenario + "': " + message);
}

bool is_3d_only(EstimatorKind kind) {
  return kind == EstimatorKind::kVhatE || kind == EstimatorKind::kBelsZ;
}

bool is_sine_variance(EstimatorKind kind) {
  return kind == EstimatorKind::kVhatA || kind == EstimatorKind::kVhatE;
}

template <std::size_t D>
Point<D> to_point(const Coords& c) {
  Point<D> p{};
  std::copy_n(c.begin(), D, p.begin());
  return p;
}

template <std::size_t D>
Coords to_coords(const Point<D>& p) {
  return Coords(p.begin(), p.end());
}

template <std::size_t D>
std::vector<Point<D>> realize(const Scenario& sc, std::size_t n, std::uint64_t seed) {
  std::vector<Point<D>> out;
  out.reserve(n);
  if (const auto* fixed = std::get_if<FixedArray>(&sc.array)) {
    for (const Coords& s : fixed->sensors) out.push_back(to_point<D>(s));
  } else if (const auto* rep = std::get_if<Replicated>(&sc.array)) {
    const std::size_t sites = rep->sites.size();
    for (std::size_t i = 0; i < n; ++i) out.push_back(to_point<D>(rep->sites[i % sites]));
  } else {
    const auto& circle = std::get<RandomCircle>(sc.array);
    for (std::size_t i = 0; i < n; ++i) {
      const double beta =
          2.0 * std::numbers::pi * rng::uniform_pair(seed, rng::Stream::kSensorLayout, i).first;
      Point<D> p = to_point<D>(circle.center);
      p[0] += circle.radius * std::cos(beta);
      p[1] += circle.radius * std::sin(beta);
      out.push_back(p);
    }
  }
  return out;
}

// Either a value or the message of the aoa::Error that prevented it.
template <class T>
struct Outcome {
  std::optional<T> value;
  std::string error;
};

template <class F>
auto attempt(F&& f) -> Outcome<decltype(f())> {
  try {
    return {f(), {}};
  } catch (const Error& e) {
    return {std::nullopt, e.what()};
  }
}

template <class T, class F>
auto then(const Outcome<T>& in, F&& f) -> Outcome<decltype(f(*in.value))> {
  if (!in.value) return {std::nullopt, in.error};
  return attempt([&] { return f(*in.value); });
}

struct Wanted {
  explicit Wanted(std::span<const EstimatorKind> kinds) {
    for (EstimatorKind k : kinds) flags[static_cast<std::size_t>(k)] = true;
  }
  bool operator()(EstimatorKind k) const { return flags[static_cast<std::size_t>(k)]; }
  bool any(std::initializer_list<EstimatorKind> ks) const {
    return std::any_of(ks.begin(), ks.end(), [&](EstimatorKind k) { return (*this)(k); });
  }
  std::array<bool, kAllKinds.size()> flags{};
};

using Results = std::array<Outcome<Coords>, kAllKinds.size()>;

void store(Results& out, EstimatorKind kind, Outcome<Coords> value) {
  out[static_cast<std::size_t>(kind)] = std::move(value);
}

template <std::size_t D>
Outcome<Coords> as_coords(const Outcome<Point<D>>& p) {
  return then(p, [](const Point<D>& v) { return to_coords<D>(v); });
}

Outcome<Coords> scalar(const Outcome<double>& v) {
  return then(v, [](double x) { return Coords{x}; });
}

Results evaluate_2d(const Scenario& sc, const SensorArray2d& array, const MeasurementSet& meas,
                    const Wanted& want) {
  Results out;
  const Regression2d reg(array, meas);
  const double va = var_sin(*sc.noise.sigma_a);
  using K = EstimatorKind;

  if (want(K::kPls)) {
    store(out, K::kPls, as_coords<2>(attempt([&] { return pls(reg).position; })));
  }
  if (want.any({K::kBels, K::kBelsGn})) {
    const auto first = attempt([&] { return bels(reg, va).position; });
    store(out, K::kBels, as_coords<2>(first));
    if (want(K::kBelsGn)) {
      store(out, K::kBelsGn, as_coords<2>(then(first, [&](const Point2& p) {
              return gn_refine_2d(array, meas, p).position;
            })));
    }
  }
  if (want.any({K::kVhatA, K::kBelsVhat, K::kBelsVhatGn})) {
    const auto v = attempt([&] { return estimate_var_sin_2d(reg).value; });
    store(out, K::kVhatA, scalar(v));
    const auto first = then(v, [&](double vv) { return bels(reg, vv).position; });
    store(out, K::kBelsVhat, as_coords<2>(first));
    if (want(K::kBelsVhatGn)) {
      store(out, K::kBelsVhatGn, as_coords<2>(then(first, [&](const Point2& p) {
              return gn_refine_2d(array, meas, p).position;
            })));
    }
  }
  return out;
}

struct ThreeDStage {
  Point3 position;
  double v_sin_a = 0.0;
  double v_sin_e = 0.0;
};

Results evaluate_3d(const Scenario& sc, const SensorArray3d& array, const MeasurementSet& meas,
                    const Wanted& want) {
  Results out;
  const Regression2d reg(project_to_plane(array), meas);
  const double sa = *sc.noise.sigma_a;
  const double se = *sc.noise.sigma_e;
  using K = EstimatorKind;

  // Planar BELS at sine variance va, then the z regression at ve (or at the
  // data-driven elevation estimate when ve is empty).
  auto stage = [&](double va, std::optional<double> ve) {
    const Point2 planar = bels(reg, va).position;
    const ZRegression zreg(array, meas, planar);
    const double v_e = ve ? *ve : estimate_var_sin_e(zreg).value;
    return ThreeDStage{{planar[0], planar[1], bels_z(zreg, v_e)}, va, v_e};
  };

  if (want(K::kPls)) {
    store(out, K::kPls, as_coords<3>(attempt([&] { return stage(0.0, 0.0).position; })));
  }
  if (want.any({K::kBels, K::kBelsGn, K::kBelsZ})) {
    const auto first = attempt([&] { return stage(var_sin(sa), var_sin(se)); });
    store(out, K::kBels, then(first, [](const ThreeDStage& s) { return to_coords<3>(s.position); }));
    store(out, K::kBelsZ, then(first, [](const ThreeDStage& s) { return Coords{s.position[2]}; }));
    if (want(K::kBelsGn)) {
      store(out, K::kBelsGn, as_coords<3>(then(first, [&](const ThreeDStage& s) {
              return gn_refine_3d(array, meas, sa, se, s.position).position;
            })));
    }
  }
  if (want.any({K::kVhatA, K::kVhatE, K::kBelsVhat, K::kBelsVhatGn})) {
    const auto va = attempt([&] { return estimate_var_sin_2d(reg).value; });
    store(out, K::kVhatA, scalar(va));
    const auto first = then(va, [&](double v) { return stage(v, std::nullopt); });
    store(out, K::kVhatE, then(first, [](const ThreeDStage& s) { return Coords{s.v_sin_e}; }));
    store(out, K::kBelsVhat,
          then(first, [](const ThreeDStage& s) { return to_coords<3>(s.position); }));
    if (want(K::kBelsVhatGn)) {
      store(out, K::kBelsVhatGn, as_coords<3>(then(first, [&](const ThreeDStage& s) {
              return gn_refine_3d(array, meas, sigma_from_var_sin(s.v_sin_a),
                                  sigma_from_var_sin(s.v_sin_e), s.position)
                  .position;
            })));
    }
  }
  return out;
}

template <std::size_t D>
MeasurementSet synthesize(const Scenario& sc, const SensorArray<D>& array, std::uint64_t seed) {
  return synthesize_measurements(array, to_point<D>(sc.source), sc.noise, seed);
}

template <std::size_t D>
Results evaluate(const Scenario& sc, const SensorArray<D>& array, const MeasurementSet& meas,
                 const Wanted& want) {
  if constexpr (D == 2) {
    return evaluate_2d(sc, array, meas, want);
  } else {
    return evaluate_3d(sc, array, meas, want);
  }
}

Coords truth_for(const Scenario& sc, EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kVhatA: return {var_sin(*sc.noise.sigma_a)};
    case EstimatorKind::kVhatE: return {var_sin(*sc.noise.sigma_e)};
    case EstimatorKind::kBelsZ: return {sc.source[2]};
    default: return sc.source;
  }
}

// tr(F^-1) and [F^-1]_zz for one array; NaN when F is singular.
struct Bound {
  double trace = std::numeric_limits<double>::quiet_NaN();
  double zz = std::numeric_limits<double>::quiet_NaN();
};

template <std::size_t D>
Bound bound_for(const Scenario& sc, const SensorArray<D>& array, std::size_t multiplicity) {
  Bound b;
  try {
    if constexpr (D == 2) {
      const auto f = fisher_2d(array, to_point<2>(sc.source), *sc.noise.sigma_a, multiplicity);
      b.trace = std::pow(rcrlb(f), 2);
    } else {
      const auto f = fisher_3d(array, to_point<3>(sc.source), *sc.noise.sigma_a,
                               *sc.noise.sigma_e, multiplicity);
      b.trace = std::pow(rcrlb(f), 2);
      b.zz = std::pow(rcrlb_component(f, 2), 2);
    }
  } catch (const Error&) {
  }
  return b;
}

template <std::size_t D>
McSummary campaign(const Scenario& sc, const CampaignOptions& options) {
  const Wanted want(sc.estimators);
  const bool random_array = std::holds_alternative<RandomCircle>(sc.array);
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.parallelism, sc.runs));

  McSummary summary;
  summary.scenario = sc.name;
  for (std::size_t n : sc.n_list) {
    std::vector<Results> results(sc.runs);
    std::vector<Bound> bounds(random_array ? sc.runs : 0);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t j = next++; j < sc.runs; j = next++) {
        const std::uint64_t seed = rng::derive_run_seed(sc.base_seed, n, j);
        const SensorArray<D> array(realize<D>(sc, n, seed));
        const MeasurementSet meas = synthesize<D>(sc, array, seed);
        results[j] = evaluate<D>(sc, array, meas, want);
        if (random_array) bounds[j] = bound_for<D>(sc, array, 1);
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    Bound bound;
    if (random_array) {
      double tr = 0.0, zz = 0.0;
      for (const Bound& b : bounds) {
        tr += b.trace;
        zz += b.zz;
      }
      bound.trace = tr / static_cast<double>(sc.runs);
      bound.zz = zz / static_cast<double>(sc.runs);
    } else if (const auto* rep = std::get_if<Replicated>(&sc.array)) {
      std::vector<Point<D>> sites;
      for (const Coords& s : rep->sites) sites.push_back(to_point<D>(s));
      bound = bound_for<D>(sc, SensorArray<D>(std::move(sites)), n / rep->sites.size());
    } else {
      bound = bound_for<D>(sc, SensorArray<D>(realize<D>(sc, n, 0)), 1);
    }

    for (EstimatorKind kind : sc.estimators) {
      const std::size_t k = static_cast<std::size_t>(kind);
      CellSummary cell;
      cell.scenario = sc.name;
      cell.n = n;
      cell.estimator = kind;
      cell.base_seed = sc.base_seed;
      cell.first_seed = rng::derive_run_seed(sc.base_seed, n, 0);
      cell.last_seed = rng::derive_run_seed(sc.base_seed, n, sc.runs - 1);
      std::vector<Coords> ok;
      ok.reserve(sc.runs);
      for (std::size_t j = 0; j < sc.runs; ++j) {
        const Outcome<Coords>& r = results[j][k];
        if (r.value) ok.push_back(*r.value);
        if (options.keep_runs) {
          summary.runs.push_back({n, kind, j, rng::derive_run_seed(sc.base_seed, n, j), r.value,
                                  r.error});
        }
      }
      cell.runs_completed = ok.size();
      cell.runs_failed = sc.runs - ok.size();
      if (ok.empty()) {
        cell.bias = cell.rmse = std::numeric_limits<double>::quiet_NaN();
      } else {
        const Metrics m = metrics(ok, truth_for(sc, kind));
        cell.bias = m.bias;
        cell.rmse = m.rmse;
      }
      if (is_sine_variance(kind)) {
        cell.rcrlb = std::numeric_limits<double>::quiet_NaN();
      } else if (kind == EstimatorKind::kBelsZ) {
        cell.rcrlb = std::sqrt(bound.zz);
      } else {
        cell.rcrlb = std::sqrt(bound.trace);
      }
      summary.cells.push_back(std::move(cell));
    }
  }
  return summary;
}

template <std::size_t D>
std::vector<BenchRow> bench(const Scenario& sc, int repeats) {
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (std::size_t n : sc.n_list) {
    const std::uint64_t seed = rng::derive_run_seed(sc.base_seed, n, 0);
    const SensorArray<D> array(realize<D>(sc, n, seed));
    const MeasurementSet meas = synthesize<D>(sc, array, seed);
    const std::size_t reps = std::max<std::size_t>(1, 100000 / n);
    for (EstimatorKind kind : sc.estimators) {
      const EstimatorKind one[] = {kind};
      const Wanted want(one);
      std::vector<double> samples;
      for (int s = 0; s < repeats; ++s) {
        const auto start = Clock::now();
        for (std::size_t r = 0; r < reps; ++r) {
          const Results res = evaluate<D>(sc, array, meas, want);
          if (!res[static_cast<std::size_t>(kind)].value) {
            throw Error(ErrorKind::kIllConditioned,
                        "benchmark input failed: " + res[static_cast<std::size_t>(kind)].error);
          }
        }
        const std::chrono::duration<double> elapsed = Clock::now() - start;
        samples.push_back(elapsed.count() / static_cast<double>(reps));
      }
      std::sort(samples.begin(), samples.end());
      rows.push_back({sc.name, n, kind, samples[samples.size() / 2], 1.0});
    }
  }
  for (BenchRow& row : rows) {
    const auto first = std::find_if(rows.begin(), rows.end(), [&](const BenchRow& r) {
      return r.estimator == row.estimator;
    });
    row.ratio_to_first = row.median_seconds / first->median_seconds;
  }
  return rows;
}

void validate_coords(const Scenario& sc, const Coords& c, const std::string& what) {
  if (c.size() != static_cast<std::size_t>(sc.dim)) {
    usage(sc.name, what + " must have " + std::to_string(sc.dim) + " coordinates");
  }
  for (double x : c) {
    if (!std::isfinite(x)) usage(sc.name, what + " has a non-finite coordinate");
  }
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kPls: return "PLS";
    case EstimatorKind::kBels: return "BELS";
    case EstimatorKind::kBelsGn: return "BELS+GN";
    case EstimatorKind::kBelsVhat: return "BELS(vhat)";
    case EstimatorKind::kBelsVhatGn: return "BELS(vhat)+GN";
    case EstimatorKind::kVhatA: return "vhat_a";
    case EstimatorKind::kVhatE: return "vhat_e";
    case EstimatorKind::kBelsZ: return "BELS_z";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) {
  for (EstimatorKind k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::span<const EstimatorKind> all_estimators() { return kAllKinds; }

void Scenario::validate() const {
  if (name.empty()) throw Error(ErrorKind::kUsage, "scenario name is empty");
  if (dim != 2 && dim != 3) usage(name, "dim must be 2 or 3");
  validate_coords(*this, source, "source");
  if (!noise.sigma_a) usage(name, "sigma_a must be given");
  if (dim == 3 && !noise.sigma_e) usage(name, "sigma_e must be given for 3-D scenarios");
  if (dim == 2 && noise.sigma_e) usage(name, "sigma_e is only meaningful in 3-D");
  try {
    noise.validate();
  } catch (const Error& e) {
    usage(name, e.what());
  }
  if (n_list.empty()) usage(name, "n_list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 4) usage(name, "every n must be at least 4");
    if (i > 0 && n_list[i] <= n_list[i - 1]) usage(name, "n_list must be strictly ascending");
  }
  if (runs < 1) usage(name, "runs must be at least 1");
  if (estimators.empty()) usage(name, "estimators is empty");
  std::set<EstimatorKind> seen;
  for (EstimatorKind k : estimators) {
    if (!seen.insert(k).second) usage(name, "estimator " + std::string(to_string(k)) + " listed twice");
    if (dim == 2 && is_3d_only(k)) {
      usage(name, "estimator " + std::string(to_string(k)) + " needs a 3-D scenario");
    }
  }

  if (const auto* fixed = std::get_if<FixedArray>(&array)) {
    for (const Coords& s : fixed->sensors) validate_coords(*this, s, "sensor");
    for (std::size_t n : n_list) {
      if (n != fixed->sensors.size()) {
        usage(name, "fixed array has " + std::to_string(fixed->sensors.size()) +
                        " sensors but n_list asks for " + std::to_string(n));
      }
    }
  } else if (const auto* rep = std::get_if<Replicated>(&array)) {
    if (rep->sites.size() < SensorArray2d::kMinSensors) usage(name, "replicated array needs >= 3 sites");
    for (const Coords& s : rep->sites) validate_coords(*this, s, "site");
    for (std::size_t n : n_list) {
      if (n % rep->sites.size() != 0) {
        usage(name, "n = " + std::to_string(n) + " is not a multiple of the " +
                        std::to_string(rep->sites.size()) + " sites");
      }
    }
  } else {
    const auto& circle = std::get<RandomCircle>(array);
    if (!(circle.radius > 0.0) || !std::isfinite(circle.radius)) usage(name, "radius must be positive");
    validate_coords(*this, circle.center, "circle center");
  }
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.name == b.name && a.dim == b.dim && a.array == b.array && a.source == b.source &&
         a.noise.sigma_a == b.noise.sigma_a && a.noise.sigma_e == b.noise.sigma_e &&
         a.n_list == b.n_list && a.estimators == b.estimators && a.runs == b.runs &&
         a.base_seed == b.base_seed;
}

Metrics metrics(std::span<const Coords> estimates, std::span<const double> truth) {
  if (estimates.empty()) throw Error(ErrorKind::kUsage, "metrics need at least one estimate");
  const std::size_t m = truth.size();
  std::vector<double> mean(m, 0.0);
  double sq = 0.0;
  for (const Coords& e : estimates) {
    if (e.size() != m) throw Error(ErrorKind::kUsage, "estimate dimension does not match truth");
    for (std::size_t k = 0; k < m; ++k) {
      const double d = e[k] - truth[k];
      mean[k] += d;
      sq += d * d;
    }
  }
  const double count = static_cast<double>(estimates.size());
  Metrics out;
  for (double d : mean) out.bias += std::abs(d / count);
  out.rmse = std::sqrt(sq / count);
  return out;
}

const CellSummary* McSummary::find(std::size_t n, EstimatorKind kind) const {
  for (const CellSummary& c : cells) {
    if (c.n == n && c.estimator == kind) return &c;
  }
  return nullptr;
}

McSummary run_campaign(const Scenario& scenario, const CampaignOptions& options) {
  scenario.validate();
  return scenario.dim == 2 ? campaign<2>(scenario, options) : campaign<3>(scenario, options);
}

double slope_check(const McSummary& summary, EstimatorKind kind) {
  std::vector<std::pair<double, double>> pts;
  for (const CellSummary& c : summary.cells) {
    if (c.estimator != kind) continue;
    if (!(c.rmse > 0.0) || !std::isfinite(c.rmse)) {
      throw Error(ErrorKind::kUsage, "slope needs positive finite RMSE at every n");
    }
    pts.emplace_back(std::log(static_cast<double>(c.n)), std::log(c.rmse));
  }
  if (pts.size() < 3) throw Error(ErrorKind::kUsage, "slope needs at least 3 values of n");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  if (sxx == 0.0) throw Error(ErrorKind::kUsage, "slope needs distinct values of n");
  return sxy / sxx;
}

std::vector<Coords> realize_sensors(const Scenario& scenario, std::size_t n,
                                    std::uint64_t run_seed) {
  std::vector<Coords> out;
  if (scenario.dim == 2) {
    for (const auto& p : realize<2>(scenario, n, run_seed)) out.push_back(to_coords<2>(p));
  } else {
    for (const auto& p : realize<3>(scenario, n, run_seed)) out.push_back(to_coords<3>(p));
  }
  return out;
}

namespace {

template <std::size_t D>
SensorArray<D> make_array(std::span<const Coords> sensors) {
  std::vector<Point<D>> pts;
  pts.reserve(sensors.size());
  for (const Coords& c : sensors) {
    if (c.size() != D) throw Error(ErrorKind::kUsage, "sensor dimension does not match scenario");
    pts.push_back(to_point<D>(c));
  }
  return SensorArray<D>(std::move(pts));
}

}  // namespace

std::vector<std::optional<Coords>> evaluate_estimators(const Scenario& scenario,
                                                       std::span<const Coords> sensors,
                                                       const MeasurementSet& meas,
                                                       std::span<const EstimatorKind> kinds,
                                                       std::vector<std::string>* errors) {
  const Wanted want(kinds);
  const Results res = scenario.dim == 2
                          ? evaluate<2>(scenario, make_array<2>(sensors), meas, want)
                          : evaluate<3>(scenario, make_array<3>(sensors), meas, want);
  std::vector<std::optional<Coords>> out;
  if (errors) errors->clear();
  for (EstimatorKind k : kinds) {
    const Outcome<Coords>& r = res[static_cast<std::size_t>(k)];
    out.push_back(r.value);
    if (errors) errors->push_back(r.error);
  }
  return out;
}

MeasurementSet synthesize_run(const Scenario& scenario, std::span<const Coords> sensors,
                              std::uint64_t run_seed) {
  return scenario.dim == 2 ? synthesize<2>(scenario, make_array<2>(sensors), run_seed)
                           : synthesize<3>(scenario, make_array<3>(sensors), run_seed);
}

std::vector<BenchRow> run_bench(const Scenario& scenario, int repeats) {
  scenario.validate();
  if (repeats < 1) throw Error(ErrorKind::kUsage, "repeats must be at least 1");
  return scenario.dim == 2 ? bench<2>(scenario, repeats) : bench<3>(scenario, repeats);
}

}  // namespace aoa::mc
