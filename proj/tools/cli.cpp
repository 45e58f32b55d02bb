#include "cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "aoa/config.hpp"
#include "aoa/crlb.hpp"
#include "aoa/estimator2d.hpp"
#include "aoa/estimator3d.hpp"
#include "aoa/io.hpp"
#include "aoa/rng.hpp"

namespace aoa::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kUsage, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kUsage, "cannot write '" + path + "'");
  os << text;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
    case ErrorKind::kOutOfRange: return kExitInput;
    default: return kExitNumerical;
  }
}

std::string num(double v) { return io::format_double(v); }

// ---- estimate ---------------------------------------------------------------

struct EstimateArgs {
  std::string file;
  int dim = 2;
  std::optional<double> sigma_a;
  std::optional<double> sigma_e;
  std::string method = "two-step";
  int gn_iters = 1;
  bool degrees = false;
};

template <std::size_t D>
SensorArray<D> to_array(const std::vector<mc::Coords>& sensors) {
  std::vector<Point<D>> pts;
  for (const auto& c : sensors) {
    Point<D> p{};
    std::copy_n(c.begin(), D, p.begin());
    pts.push_back(p);
  }
  return SensorArray<D>(std::move(pts));
}

void print_diagnostics(std::ostream& out, const Diagnostics& d) {
  auto opt = [&](const char* name, double v) {
    if (!std::isnan(v)) out << name << ": " << num(v) << '\n';
  };
  if (d.v_sin_a) {
    out << "v_sin_a: " << num(*d.v_sin_a) << (d.v_sin_a_estimated ? " (estimated)" : " (known)")
        << '\n';
  }
  if (d.v_sin_e) {
    out << "v_sin_e: " << num(*d.v_sin_e) << (d.v_sin_e_estimated ? " (estimated)" : " (known)")
        << '\n';
  }
  if (d.v_sin_clamped) out << "v_sin_clamped: yes\n";
  opt("gram_condition", d.gram_condition);
  opt("z_denominator", d.z_denominator);
  if (d.gn_iterations > 0) {
    out << "gn_iterations: " << d.gn_iterations << '\n';
    opt("gn_condition", d.gn_condition);
    opt("gn_step_norm", d.gn_step_norm);
    opt("gn_residual_rms", d.gn_residual_rms);
  }
}

template <std::size_t D>
void print_estimate(std::ostream& out, const Estimate<D>& est, std::size_t n) {
  out << "method: " << to_string(est.method) << '\n';
  out << "dimension: " << D << '\n';
  out << "sensors: " << n << '\n';
  out << "estimate:";
  for (double c : est.position) out << ' ' << num(c);
  out << '\n';
  print_diagnostics(out, est.diagnostics);
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const io::MeasurementFile file = io::parse_measurements(read_file(a.file), a.dim, a.degrees);
  NoiseModel noise{a.sigma_a, a.sigma_e};
  noise.validate();
  if (a.dim == 2 && a.sigma_e) throw Error(ErrorKind::kUsage, "--sigma-e needs --dim 3");
  GnOptions gn;
  gn.max_iters = a.gn_iters;

  if (a.dim == 2) {
    const SensorArray2d array = to_array<2>(file.sensors);
    Estimate2d est;
    if (a.method == "pls") {
      est = pls(Regression2d(array, file.meas));
    } else if (a.method == "bels") {
      const Regression2d reg(array, file.meas);
      if (a.sigma_a) {
        est = bels(reg, var_sin(*a.sigma_a));
      } else {
        const SineVarianceEstimate v = estimate_var_sin_2d(reg);
        est = bels(reg, v.value);
        est.diagnostics.v_sin_a_estimated = true;
        est.diagnostics.v_sin_clamped = v.clamped;
      }
    } else {
      est = two_step_2d(array, file.meas, noise, gn);
    }
    print_estimate(out, est, array.size());
    if (a.sigma_a) {
      out << "rcrlb_at_estimate: ";
      try {
        out << num(rcrlb(fisher_2d(array, est.position, *a.sigma_a))) << '\n';
      } catch (const Error& e) {
        out << "undefined (" << to_string(e.kind()) << ")\n";
      }
    }
  } else {
    const SensorArray3d array = to_array<3>(file.sensors);
    Estimate3d est;
    if (a.method == "pls") {
      est = pls_3d(array, file.meas);
    } else if (a.method == "bels") {
      if (!a.sigma_a || !a.sigma_e) {
        throw Error(ErrorKind::kUsage, "--method bels in 3-D needs --sigma-a and --sigma-e");
      }
      est = bels_3d(array, file.meas, var_sin(*a.sigma_a), var_sin(*a.sigma_e));
    } else {
      est = two_step_3d(array, file.meas, noise, gn);
    }
    print_estimate(out, est, array.size());
    if (a.sigma_a && a.sigma_e) {
      out << "rcrlb_at_estimate: ";
      try {
        out << num(rcrlb(fisher_3d(array, est.position, *a.sigma_a, *a.sigma_e))) << '\n';
      } catch (const Error& e) {
        out << "undefined (" << to_string(e.kind()) << ")\n";
      }
    }
  }
  return kExitOk;
}

// ---- campaign / bench / synthesize -----------------------------------------

struct SourceArgs {
  std::string config_file;
  std::vector<std::string> presets;
};

config::ConfigDocument load_document(const SourceArgs& src) {
  config::ConfigDocument doc;
  if (!src.config_file.empty()) doc = config::parse_config(read_file(src.config_file));
  for (const auto& name : src.presets) {
    config::ConfigDocument p = config::preset(name);
    for (auto& s : p.scenarios) doc.scenarios.push_back(std::move(s));
    for (auto& c : p.checks) doc.checks.push_back(std::move(c));
  }
  if (doc.scenarios.empty()) {
    throw Error(ErrorKind::kUsage, "no scenarios: give a config file or --preset");
  }
  if (const char* env = std::getenv("AOA_SEED"); env && *env) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long seed = std::strtoull(env, &end, 10);
    if (*end != '\0' || errno != 0 || env[0] == '-') {
      throw Error(ErrorKind::kUsage, std::string("AOA_SEED is not an unsigned integer: ") + env);
    }
    for (auto& s : doc.scenarios) s.base_seed = seed;
  }
  return doc;
}

void print_summary(std::ostream& os, const std::vector<mc::McSummary>& summaries) {
  char line[256];
  std::snprintf(line, sizeof line, "%-34s %6s %-14s %12s %12s %12s %8s %6s %5s\n", "scenario", "n",
                "estimator", "bias", "rmse", "rcrlb", "rmse/crb", "runs", "fail");
  os << line;
  for (const auto& s : summaries) {
    for (const auto& c : s.cells) {
      std::snprintf(line, sizeof line, "%-34s %6zu %-14s %12.6g %12.6g %12.6g %8.4f %6zu %5zu%s\n",
                    c.scenario.c_str(), c.n, std::string(mc::to_string(c.estimator)).c_str(),
                    c.bias, c.rmse, c.rcrlb, c.rmse / c.rcrlb, c.runs_completed, c.runs_failed,
                    c.valid() ? "" : "  INVALID");
      os << line;
    }
  }
}

struct CampaignArgs {
  SourceArgs source;
  std::string out_csv;
  std::string dump;
  std::size_t jobs = 1;
  std::optional<std::size_t> runs;
  bool check = false;
};

int cmd_campaign(const CampaignArgs& a, std::ostream& out, std::ostream& err) {
  config::ConfigDocument doc = load_document(a.source);
  if (a.runs) {
    if (*a.runs < 1) throw Error(ErrorKind::kUsage, "--runs must be at least 1");
    for (auto& s : doc.scenarios) s.runs = *a.runs;
  }
  const std::string csv_path = !a.out_csv.empty() ? a.out_csv : doc.output.csv.value_or("");
  const std::string dump_path = !a.dump.empty() ? a.dump : doc.output.runs_dump.value_or("");

  mc::CampaignOptions options;
  options.parallelism = a.jobs;
  options.keep_runs = !dump_path.empty();
  std::vector<mc::McSummary> summaries;
  for (const auto& s : doc.scenarios) summaries.push_back(mc::run_campaign(s, options));

  std::ostringstream csv;
  io::write_campaign_csv(csv, summaries);
  if (csv_path.empty()) {
    out << csv.str();
    print_summary(err, summaries);
  } else {
    write_file(csv_path, csv.str());
    print_summary(out, summaries);
  }
  if (!dump_path.empty()) {
    std::ostringstream runs;
    io::write_runs_csv(runs, summaries);
    write_file(dump_path, runs.str());
  }

  if (!a.check) return kExitOk;
  std::ostream& report = csv_path.empty() ? err : out;
  bool ok = true;
  for (const auto& r : config::evaluate_checks(doc.checks, summaries)) {
    report << (r.passed ? "PASS " : "FAIL ") << r.label << " (value " << num(r.value) << ")\n";
    ok = ok && r.passed;
  }
  if (doc.checks.empty()) report << "no checks defined\n";
  return ok ? kExitOk : kExitCheckFailed;
}

struct BenchArgs {
  SourceArgs source;
  int repeats = 5;
  std::string out_csv;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const config::ConfigDocument doc = load_document(a.source);
  std::vector<mc::BenchRow> rows;
  for (const auto& s : doc.scenarios) {
    auto r = mc::run_bench(s, a.repeats);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::ostringstream csv;
  io::write_bench_csv(csv, rows);
  if (a.out_csv.empty()) {
    out << csv.str();
  } else {
    write_file(a.out_csv, csv.str());
  }
  return kExitOk;
}

struct SynthesizeArgs {
  SourceArgs source;
  std::string scenario;
  std::size_t n = 0;
  std::size_t run = 0;
};

int cmd_synthesize(const SynthesizeArgs& a, std::ostream& out) {
  const config::ConfigDocument doc = load_document(a.source);
  const mc::Scenario* sc = &doc.scenarios.front();
  if (!a.scenario.empty()) {
    const auto it = std::find_if(doc.scenarios.begin(), doc.scenarios.end(),
                                 [&](const mc::Scenario& s) { return s.name == a.scenario; });
    if (it == doc.scenarios.end()) throw Error(ErrorKind::kUsage, "no scenario named '" + a.scenario + "'");
    sc = &*it;
  }
  const std::size_t n = a.n ? a.n : sc->n_list.front();
  mc::Scenario one = *sc;
  one.n_list = {n};
  one.validate();
  const std::uint64_t seed = rng::derive_run_seed(one.base_seed, n, a.run);
  io::MeasurementFile file;
  file.dim = one.dim;
  file.sensors = mc::realize_sensors(one, n, seed);
  file.meas = mc::synthesize_run(one, file.sensors, seed);
  out << io::format_measurements(file);
  return kExitOk;
}

void add_source_options(CLI::App* cmd, SourceArgs& src) {
  cmd->add_option("config", src.config_file, "JSON config file");
  cmd->add_option("--preset", src.presets, "Compiled-in preset (repeatable)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bearing-only (AOA) source localization"};
  app.name("aoa");
  app.require_subcommand(0, 1);
  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "List compiled-in presets and exit");

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate the source from a measurement file");
  c_est->add_option("file", est.file, "Measurement file")->required();
  c_est->add_option("--dim", est.dim, "Dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  c_est->add_option("--sigma-a", est.sigma_a, "Known azimuth noise std (radians)");
  c_est->add_option("--sigma-e", est.sigma_e, "Known elevation noise std (radians)");
  c_est->add_option("--method", est.method, "two-step | bels | pls")
      ->check(CLI::IsMember({"two-step", "bels", "pls"}));
  c_est->add_option("--gn-iters", est.gn_iters, "Gauss-Newton iterations for two-step")
      ->check(CLI::Range(1, 1000));
  c_est->add_flag("--degrees", est.degrees, "Angles in the file are degrees");

  CampaignArgs camp;
  auto* c_camp = app.add_subcommand("campaign", "Run Monte Carlo campaigns");
  add_source_options(c_camp, camp.source);
  c_camp->add_option("--out", camp.out_csv, "CSV output path (default: stdout)");
  c_camp->add_option("--dump", camp.dump, "Per-run CSV output path");
  c_camp->add_option("--jobs", camp.jobs, "Worker threads")->check(CLI::Range(1, 256));
  c_camp->add_option("--runs", camp.runs, "Override the Monte Carlo run count");
  c_camp->add_flag("--check", camp.check, "Evaluate the config's checks; exit 4 on failure");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time the estimators over the n sweep");
  add_source_options(c_bench, bench.source);
  c_bench->add_option("--repeats", bench.repeats, "Timing samples per cell")->check(CLI::Range(1, 100));
  c_bench->add_option("--out", bench.out_csv, "CSV output path (default: stdout)");

  SynthesizeArgs syn;
  auto* c_syn = app.add_subcommand("synthesize", "Write a measurement file for one run");
  add_source_options(c_syn, syn.source);
  c_syn->add_option("--scenario", syn.scenario, "Scenario name (default: first)");
  c_syn->add_option("--n", syn.n, "Sample size (default: first n)");
  c_syn->add_option("--run", syn.run, "Run index used to derive the seed");

  std::string preset_name;
  auto* c_preset = app.add_subcommand("preset", "Print a preset as a JSON config");
  c_preset->add_option("name", preset_name, "Preset name")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (list_presets) {
      for (const auto& name : config::preset_names()) out << name << '\n';
      return kExitOk;
    }
    if (c_est->parsed()) return cmd_estimate(est, out);
    if (c_camp->parsed()) return cmd_campaign(camp, out, err);
    if (c_bench->parsed()) return cmd_bench(bench, out);
    if (c_syn->parsed()) return cmd_synthesize(syn, out);
    if (c_preset->parsed()) {
      out << config::serialize_config(config::preset(preset_name));
      return kExitOk;
    }
    out << app.help();
    return kExitInput;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

}  // namespace aoa::cli
