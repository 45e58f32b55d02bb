#include "aoa/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <set>

#include "json.hpp"

namespace aoa::config {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::kUsage, (where.empty() ? std::string("/") : where) + ": " + what);
}

std::string child(const std::string& where, std::string_view key) {
  return where + "/" + std::string(key);
}

std::string child(const std::string& where, std::size_t index) {
  return where + "/" + std::to_string(index);
}

const json& require_object(const json& j, const std::string& where,
                           std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(child(where, key), "unknown key");
    }
  }
  return j;
}

const json& require_key(const json& j, const std::string& where, std::string_view key) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) fail(child(where, key), "missing required key");
  return *it;
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

std::uint64_t get_unsigned(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    fail(where, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

const json& require_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

mc::Coords get_coords(const json& j, const std::string& where) {
  mc::Coords c;
  require_array(j, where);
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(get_number(j[i], child(where, i)));
  return c;
}

std::vector<mc::Coords> get_coord_list(const json& j, const std::string& where) {
  std::vector<mc::Coords> out;
  require_array(j, where);
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_coords(j[i], child(where, i)));
  return out;
}

mc::EstimatorKind get_estimator(const json& j, const std::string& where) {
  const std::string name = get_string(j, where);
  const auto kind = mc::parse_estimator(name);
  if (!kind) fail(where, "unknown estimator '" + name + "'");
  return *kind;
}

mc::ArraySpec parse_array(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::string type = get_string(require_key(j, where, "type"), child(where, "type"));
  if (type == "fixed") {
    require_object(j, where, {"type", "sensors"});
    return mc::FixedArray{get_coord_list(require_key(j, where, "sensors"), child(where, "sensors"))};
  }
  if (type == "replicated") {
    require_object(j, where, {"type", "sites"});
    return mc::Replicated{get_coord_list(require_key(j, where, "sites"), child(where, "sites"))};
  }
  if (type == "random_circle") {
    require_object(j, where, {"type", "radius", "center"});
    return mc::RandomCircle{get_number(require_key(j, where, "radius"), child(where, "radius")),
                            get_coords(require_key(j, where, "center"), child(where, "center"))};
  }
  fail(child(where, "type"), "unknown array type '" + type + "'");
}

mc::Scenario parse_scenario(const json& j, const std::string& where) {
  require_object(j, where,
                 {"name", "dim", "array", "source", "noise", "n", "estimators", "runs", "seed"});
  mc::Scenario s;
  s.name = get_string(require_key(j, where, "name"), child(where, "name"));
  s.dim = static_cast<int>(get_unsigned(require_key(j, where, "dim"), child(where, "dim")));
  s.array = parse_array(require_key(j, where, "array"), child(where, "array"));
  s.source = get_coords(require_key(j, where, "source"), child(where, "source"));

  const std::string nw = child(where, "noise");
  const json& noise = require_object(require_key(j, where, "noise"), nw, {"sigma_a", "sigma_e"});
  s.noise.sigma_a = get_number(require_key(noise, nw, "sigma_a"), child(nw, "sigma_a"));
  if (noise.contains("sigma_e")) s.noise.sigma_e = get_number(noise["sigma_e"], child(nw, "sigma_e"));

  const std::string n_where = child(where, "n");
  const json& n_list = require_array(require_key(j, where, "n"), n_where);
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    s.n_list.push_back(get_unsigned(n_list[i], child(n_where, i)));
  }
  const std::string e_where = child(where, "estimators");
  const json& est = require_array(require_key(j, where, "estimators"), e_where);
  for (std::size_t i = 0; i < est.size(); ++i) {
    s.estimators.push_back(get_estimator(est[i], child(e_where, i)));
  }
  s.runs = get_unsigned(require_key(j, where, "runs"), child(where, "runs"));
  if (j.contains("seed")) s.base_seed = get_unsigned(j["seed"], child(where, "seed"));

  try {
    s.validate();
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return s;
}

CheckKind parse_check_kind(const json& j, const std::string& where) {
  const std::string name = get_string(j, where);
  for (CheckKind k : {CheckKind::kRatio, CheckKind::kRmse, CheckKind::kSlope}) {
    if (to_string(k) == name) return k;
  }
  fail(where, "unknown check kind '" + name + "'");
}

Check parse_check(const json& j, const std::string& where,
                  const std::vector<mc::Scenario>& scenarios) {
  require_object(j, where, {"scenario", "kind", "estimator", "n", "min", "max"});
  Check c;
  c.scenario = get_string(require_key(j, where, "scenario"), child(where, "scenario"));
  c.kind = parse_check_kind(require_key(j, where, "kind"), child(where, "kind"));
  c.estimator = get_estimator(require_key(j, where, "estimator"), child(where, "estimator"));
  if (j.contains("n")) c.n = get_unsigned(j["n"], child(where, "n"));
  if (j.contains("min")) c.min = get_number(j["min"], child(where, "min"));
  if (j.contains("max")) c.max = get_number(j["max"], child(where, "max"));
  if (!c.min && !c.max) fail(where, "a check needs min, max or both");
  if (c.kind == CheckKind::kSlope && c.n) fail(child(where, "n"), "slope checks span every n");

  const auto sc = std::find_if(scenarios.begin(), scenarios.end(),
                               [&](const mc::Scenario& s) { return s.name == c.scenario; });
  if (sc == scenarios.end()) fail(child(where, "scenario"), "no scenario named '" + c.scenario + "'");
  if (std::find(sc->estimators.begin(), sc->estimators.end(), c.estimator) == sc->estimators.end()) {
    fail(child(where, "estimator"), "scenario does not run this estimator");
  }
  if (c.n && std::find(sc->n_list.begin(), sc->n_list.end(), *c.n) == sc->n_list.end()) {
    fail(child(where, "n"), "scenario does not sweep this n");
  }
  return c;
}

json coords_json(const mc::Coords& c) { return json(c); }

json scenario_json(const mc::Scenario& s) {
  json j;
  j["name"] = s.name;
  j["dim"] = s.dim;
  if (const auto* f = std::get_if<mc::FixedArray>(&s.array)) {
    j["array"] = {{"type", "fixed"}, {"sensors", f->sensors}};
  } else if (const auto* r = std::get_if<mc::Replicated>(&s.array)) {
    j["array"] = {{"type", "replicated"}, {"sites", r->sites}};
  } else {
    const auto& c = std::get<mc::RandomCircle>(s.array);
    j["array"] = {{"type", "random_circle"}, {"radius", c.radius}, {"center", coords_json(c.center)}};
  }
  j["source"] = coords_json(s.source);
  json noise;
  if (s.noise.sigma_a) noise["sigma_a"] = *s.noise.sigma_a;
  if (s.noise.sigma_e) noise["sigma_e"] = *s.noise.sigma_e;
  j["noise"] = noise;
  j["n"] = s.n_list;
  json est = json::array();
  for (auto k : s.estimators) est.push_back(std::string(mc::to_string(k)));
  j["estimators"] = est;
  j["runs"] = s.runs;
  j["seed"] = s.base_seed;
  return j;
}

// ---- presets ---------------------------------------------------------------

const std::vector<mc::Coords> kSites2d = {{0, 100},  {0, 50},   {50, 50},   {50, 0},  {50, -50},
                                          {0, -50},  {0, -100}, {-50, -50}, {-50, 0}, {-50, 50}};

const std::vector<mc::Coords> kSites3d = {
    {50, 50, 50},   {50, 0, 50},    {50, 50, -50},   {50, 100, 0},   {50, -50, 50},
    {-50, 0, -50},  {-50, -50, 50}, {-50, -50, -50}, {-50, -100, 0}, {-50, 50, -50}};

const std::vector<std::size_t> kSweep = {100, 300, 1000, 2000, 3000, 5000};
constexpr std::uint64_t kPresetSeed = 20240901;
constexpr std::size_t kPresetRuns = 1000;

using K = mc::EstimatorKind;

std::vector<mc::Coords> lift(const std::vector<mc::Coords>& planar) {
  std::vector<mc::Coords> out;
  for (const auto& p : planar) out.push_back({p[0], p[1], 0.0});
  return out;
}

mc::Scenario scenario(std::string name, int dim, mc::ArraySpec array, mc::Coords source,
                      NoiseModel noise, std::vector<std::size_t> n_list,
                      std::vector<K> estimators) {
  mc::Scenario s;
  s.name = std::move(name);
  s.dim = dim;
  s.array = std::move(array);
  s.source = std::move(source);
  s.noise = noise;
  s.n_list = std::move(n_list);
  s.estimators = std::move(estimators);
  s.runs = kPresetRuns;
  s.base_seed = kPresetSeed;
  return s;
}

Check check(std::string scenario, CheckKind kind, K est, std::optional<std::size_t> n,
            std::optional<double> min, std::optional<double> max) {
  return {std::move(scenario), kind, est, n, min, max};
}

std::string sigma_label(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sigma-%.2f", sigma);
  return buf;
}

// Measurement rounds per site: `base` up to sigma 0.2, then growing with
// sigma^2 from there.
std::size_t rounds_for(double sigma, double base) {
  if (sigma <= 0.2) return static_cast<std::size_t>(base);
  return static_cast<std::size_t>(std::lround(base * (sigma / 0.2) * (sigma / 0.2)));
}

const std::vector<double> kSigmaGrid = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};

ConfigDocument preset_2d_fixed() {
  ConfigDocument d;
  d.scenarios.push_back(scenario("paper-2d-fixed", 2, mc::Replicated{kSites2d}, {60, 10},
                                 NoiseModel::known(0.2), kSweep,
                                 {K::kPls, K::kBels, K::kBelsGn, K::kBelsVhat, K::kBelsVhatGn,
                                  K::kVhatA}));
  d.checks.push_back(check("paper-2d-fixed", CheckKind::kRatio, K::kBelsGn, 5000, 0.9, 1.1));
  d.checks.push_back(check("paper-2d-fixed", CheckKind::kSlope, K::kBelsGn, {}, -0.6, -0.4));
  d.checks.push_back(check("paper-2d-fixed", CheckKind::kSlope, K::kPls, {}, -0.15, {}));
  return d;
}

ConfigDocument preset_table1() {
  ConfigDocument d;
  d.scenarios.push_back(scenario("paper-table1", 2, mc::Replicated{kSites2d}, {60, 10},
                                 NoiseModel::known(0.2), kSweep, {K::kVhatA}));
  const double table[] = {0.00610, 0.00339, 0.00199, 0.00139, 0.00115, 0.00086};
  for (std::size_t i = 0; i < kSweep.size(); ++i) {
    d.checks.push_back(check("paper-table1", CheckKind::kRmse, K::kVhatA, kSweep[i],
                             0.65 * table[i], 1.35 * table[i]));
  }
  return d;
}

ConfigDocument preset_2d_varying_noise() {
  ConfigDocument d;
  for (double sigma : kSigmaGrid) {
    const std::string name = "paper-2d-varying-noise-" + sigma_label(sigma);
    d.scenarios.push_back(scenario(name, 2, mc::Replicated{kSites2d}, {60, 10},
                                   NoiseModel::known(sigma), {10 * rounds_for(sigma, 100)},
                                   {K::kPls, K::kBels, K::kBelsGn, K::kBelsVhatGn}));
  }
  const std::string last = d.scenarios.back().name;
  d.checks.push_back(check(last, CheckKind::kRatio, K::kBelsGn, {}, {}, 1.1));
  d.checks.push_back(check(last, CheckKind::kRatio, K::kPls, {}, 2.0, {}));
  return d;
}

ConfigDocument preset_2d_random() {
  ConfigDocument d;
  d.scenarios.push_back(scenario("paper-2d-random", 2, mc::RandomCircle{100.0, {0, 0}}, {150, 0},
                                 NoiseModel::known(0.2), kSweep,
                                 {K::kPls, K::kBels, K::kBelsGn, K::kBelsVhatGn}));
  d.checks.push_back(check("paper-2d-random", CheckKind::kRatio, K::kBelsGn, 5000, 0.9, 1.1));
  d.checks.push_back(check("paper-2d-random", CheckKind::kSlope, K::kBelsGn, {}, -0.6, -0.4));
  return d;
}

ConfigDocument preset_3d_fixed() {
  ConfigDocument d;
  d.scenarios.push_back(scenario("paper-3d-fixed", 3, mc::Replicated{kSites3d}, {60, 10, 10},
                                 NoiseModel::known(0.2, 0.2), kSweep,
                                 {K::kPls, K::kBels, K::kBelsGn, K::kBelsVhat, K::kBelsVhatGn,
                                  K::kVhatA, K::kVhatE, K::kBelsZ}));
  d.checks.push_back(check("paper-3d-fixed", CheckKind::kRatio, K::kBelsGn, 5000, 0.9, 1.1));
  for (K k : {K::kBels, K::kBelsGn, K::kVhatA, K::kVhatE, K::kBelsZ}) {
    d.checks.push_back(check("paper-3d-fixed", CheckKind::kSlope, k, {}, -0.6, -0.4));
  }
  d.checks.push_back(check("paper-3d-fixed", CheckKind::kSlope, K::kPls, {}, -0.15, {}));
  return d;
}

ConfigDocument preset_3d_varying_noise() {
  ConfigDocument d;
  for (double sigma : kSigmaGrid) {
    const std::string name = "paper-3d-varying-noise-" + sigma_label(sigma);
    d.scenarios.push_back(scenario(name, 3, mc::Replicated{kSites3d}, {60, 10, 10},
                                   NoiseModel::known(sigma, sigma), {10 * rounds_for(sigma, 200)},
                                   {K::kPls, K::kBels, K::kBelsGn, K::kBelsVhatGn}));
  }
  const std::string last = d.scenarios.back().name;
  d.checks.push_back(check(last, CheckKind::kRatio, K::kBelsGn, {}, {}, 1.1));
  return d;
}

ConfigDocument preset_3d_coplanar() {
  ConfigDocument d;
  const auto sites = lift(kSites2d);
  const std::vector<K> est = {K::kPls, K::kBels, K::kBelsGn, K::kBelsVhatGn};
  d.scenarios.push_back(scenario("paper-3d-coplanar-offplane", 3, mc::Replicated{sites},
                                 {60, 10, 10}, NoiseModel::known(0.2, 0.2), kSweep, est));
  d.scenarios.push_back(scenario("paper-3d-coplanar", 3, mc::Replicated{sites}, {60, 10, 0},
                                 NoiseModel::known(0.2, 0.2), kSweep, est));
  for (const auto& s : d.scenarios) {
    d.checks.push_back(check(s.name, CheckKind::kSlope, K::kBelsGn, {}, -0.6, -0.4));
    d.checks.push_back(check(s.name, CheckKind::kRatio, K::kBelsGn, 5000, {}, 1.1));
  }
  return d;
}

struct PresetEntry {
  const char* name;
  ConfigDocument (*make)();
};

constexpr PresetEntry kPresets[] = {
    {"paper-2d-fixed", preset_2d_fixed},
    {"paper-table1", preset_table1},
    {"paper-2d-varying-noise", preset_2d_varying_noise},
    {"paper-2d-random", preset_2d_random},
    {"paper-3d-fixed", preset_3d_fixed},
    {"paper-3d-varying-noise", preset_3d_varying_noise},
    {"paper-3d-coplanar", preset_3d_coplanar},
};

std::string describe(const Check& c) {
  std::string s = c.scenario + " " + std::string(to_string(c.kind)) + " " +
                  std::string(mc::to_string(c.estimator));
  if (c.n) s += " n=" + std::to_string(*c.n);
  char buf[64];
  if (c.min) {
    std::snprintf(buf, sizeof buf, " >= %g", *c.min);
    s += buf;
  }
  if (c.max) {
    std::snprintf(buf, sizeof buf, " <= %g", *c.max);
    s += buf;
  }
  return s;
}

}  // namespace

std::string_view to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::kRatio: return "ratio";
    case CheckKind::kRmse: return "rmse";
    case CheckKind::kSlope: return "slope";
  }
  return "unknown";
}

ConfigDocument parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kUsage, std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "", {"scenarios", "output", "checks"});
  ConfigDocument doc;

  const json& scenarios = require_array(require_key(root, "", "scenarios"), "/scenarios");
  if (scenarios.empty()) fail("/scenarios", "at least one scenario is required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const std::string where = child("/scenarios", i);
    doc.scenarios.push_back(parse_scenario(scenarios[i], where));
    if (!names.insert(doc.scenarios.back().name).second) {
      fail(child(where, "name"), "duplicate scenario name");
    }
  }

  if (root.contains("output")) {
    const json& out = require_object(root["output"], "/output", {"csv", "runs_dump"});
    if (out.contains("csv")) doc.output.csv = get_string(out["csv"], "/output/csv");
    if (out.contains("runs_dump")) {
      doc.output.runs_dump = get_string(out["runs_dump"], "/output/runs_dump");
    }
  }
  if (root.contains("checks")) {
    const json& checks = require_array(root["checks"], "/checks");
    for (std::size_t i = 0; i < checks.size(); ++i) {
      doc.checks.push_back(parse_check(checks[i], child("/checks", i), doc.scenarios));
    }
  }
  return doc;
}

std::string serialize_config(const ConfigDocument& doc) {
  json root;
  root["scenarios"] = json::array();
  for (const auto& s : doc.scenarios) root["scenarios"].push_back(scenario_json(s));
  json out = json::object();
  if (doc.output.csv) out["csv"] = *doc.output.csv;
  if (doc.output.runs_dump) out["runs_dump"] = *doc.output.runs_dump;
  root["output"] = out;
  json checks = json::array();
  for (const auto& c : doc.checks) {
    json j;
    j["scenario"] = c.scenario;
    j["kind"] = std::string(to_string(c.kind));
    j["estimator"] = std::string(mc::to_string(c.estimator));
    if (c.n) j["n"] = *c.n;
    if (c.min) j["min"] = *c.min;
    if (c.max) j["max"] = *c.max;
    checks.push_back(j);
  }
  root["checks"] = checks;
  return root.dump(2) + "\n";
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

ConfigDocument preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return p.make();
  }
  throw Error(ErrorKind::kUsage, "unknown preset '" + std::string(name) + "'");
}

std::vector<CheckResult> evaluate_checks(const std::vector<Check>& checks,
                                         const std::vector<mc::McSummary>& summaries) {
  std::vector<CheckResult> out;
  for (const Check& c : checks) {
    CheckResult r;
    r.check = c;
    r.label = describe(c);
    r.value = std::numeric_limits<double>::quiet_NaN();
    const auto sum = std::find_if(summaries.begin(), summaries.end(),
                                  [&](const mc::McSummary& s) { return s.scenario == c.scenario; });
    if (sum != summaries.end()) {
      if (c.kind == CheckKind::kSlope) {
        const bool all_valid = std::all_of(sum->cells.begin(), sum->cells.end(), [&](const auto& cell) {
          return cell.estimator != c.estimator || cell.valid();
        });
        try {
          if (all_valid) r.value = mc::slope_check(*sum, c.estimator);
        } catch (const Error&) {
        }
      } else {
        std::size_t n = 0;
        for (const auto& cell : sum->cells) n = std::max(n, cell.n);
        if (c.n) n = *c.n;
        if (const auto* cell = sum->find(n, c.estimator); cell && cell->valid()) {
          r.value = c.kind == CheckKind::kRmse ? cell->rmse : cell->rmse / cell->rcrlb;
        }
      }
    }
    r.passed = std::isfinite(r.value) && (!c.min || r.value >= *c.min) && (!c.max || r.value <= *c.max);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace aoa::config
