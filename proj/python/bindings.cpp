#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "aoa/config.hpp"
#include "aoa/crlb.hpp"
#include "aoa/estimator2d.hpp"
#include "aoa/estimator3d.hpp"
#include "aoa/harness.hpp"

namespace py = pybind11;

namespace {

using aoa::Point2;
using aoa::Point3;

aoa::SensorArray2d array_2d(const std::vector<Point2>& sensors) { return aoa::SensorArray2d(sensors); }
aoa::SensorArray3d array_3d(const std::vector<Point3>& sensors) { return aoa::SensorArray3d(sensors); }

aoa::MeasurementSet measurements(std::vector<double> azimuth, std::vector<double> elevation = {}) {
  aoa::MeasurementSet m;
  m.azimuth = std::move(azimuth);
  m.elevation = std::move(elevation);
  return m;
}

aoa::NoiseModel noise_model(std::optional<double> sigma_a, std::optional<double> sigma_e) {
  aoa::NoiseModel n{sigma_a, sigma_e};
  n.validate();
  return n;
}

py::dict diagnostics_dict(const aoa::Diagnostics& d) {
  py::dict out;
  out["v_sin_a"] = d.v_sin_a;
  out["v_sin_e"] = d.v_sin_e;
  out["v_sin_a_estimated"] = d.v_sin_a_estimated;
  out["v_sin_e_estimated"] = d.v_sin_e_estimated;
  out["v_sin_clamped"] = d.v_sin_clamped;
  out["gram_condition"] = d.gram_condition;
  out["z_denominator"] = d.z_denominator;
  out["gn_condition"] = d.gn_condition;
  out["gn_step_norm"] = d.gn_step_norm;
  out["gn_residual_rms"] = d.gn_residual_rms;
  out["gn_iterations"] = d.gn_iterations;
  return out;
}

template <std::size_t D>
py::dict estimate_dict(const aoa::Estimate<D>& e) {
  py::dict out;
  out["position"] = std::vector<double>(e.position.begin(), e.position.end());
  out["method"] = std::string(aoa::to_string(e.method));
  out["diagnostics"] = diagnostics_dict(e.diagnostics);
  return out;
}

py::dict estimate_2d(const std::vector<Point2>& sensors, const std::vector<double>& azimuth,
                     std::optional<double> sigma_a, const std::string& method, int gn_iters) {
  const auto array = array_2d(sensors);
  const auto meas = measurements(azimuth);
  if (method == "pls") return estimate_dict(aoa::pls(aoa::Regression2d(array, meas)));
  if (method == "bels") {
    const aoa::Regression2d reg(array, meas);
    const double v = sigma_a ? aoa::var_sin(*sigma_a) : aoa::estimate_var_sin_2d(reg).value;
    return estimate_dict(aoa::bels(reg, v));
  }
  if (method != "two-step") throw aoa::Error(aoa::ErrorKind::kUsage, "method must be two-step, bels or pls");
  aoa::GnOptions gn;
  gn.max_iters = gn_iters;
  return estimate_dict(aoa::two_step_2d(array, meas, noise_model(sigma_a, std::nullopt), gn));
}

py::dict estimate_3d(const std::vector<Point3>& sensors, const std::vector<double>& azimuth,
                     const std::vector<double>& elevation, std::optional<double> sigma_a,
                     std::optional<double> sigma_e, const std::string& method, int gn_iters) {
  const auto array = array_3d(sensors);
  const auto meas = measurements(azimuth, elevation);
  if (method == "pls") return estimate_dict(aoa::pls_3d(array, meas));
  if (method == "bels") {
    if (!sigma_a || !sigma_e) throw aoa::Error(aoa::ErrorKind::kUsage, "bels needs sigma_a and sigma_e");
    return estimate_dict(aoa::bels_3d(array, meas, aoa::var_sin(*sigma_a), aoa::var_sin(*sigma_e)));
  }
  if (method != "two-step") throw aoa::Error(aoa::ErrorKind::kUsage, "method must be two-step, bels or pls");
  aoa::GnOptions gn;
  gn.max_iters = gn_iters;
  return estimate_dict(aoa::two_step_3d(array, meas, noise_model(sigma_a, sigma_e), gn));
}

py::list cells_list(const std::vector<aoa::mc::McSummary>& summaries) {
  py::list rows;
  for (const auto& s : summaries) {
    for (const auto& c : s.cells) {
      py::dict row;
      row["scenario"] = c.scenario;
      row["n"] = c.n;
      row["estimator"] = std::string(aoa::mc::to_string(c.estimator));
      row["bias"] = c.bias;
      row["rmse"] = c.rmse;
      row["rcrlb"] = c.rcrlb;
      row["runs"] = c.runs_completed;
      row["failures"] = c.runs_failed;
      row["seed"] = c.base_seed;
      row["valid"] = c.valid();
      rows.append(row);
    }
  }
  return rows;
}

py::list run_campaign_json(const std::string& config_json, std::optional<std::size_t> runs,
                           std::size_t jobs) {
  auto doc = aoa::config::parse_config(config_json);
  std::vector<aoa::mc::McSummary> summaries;
  aoa::mc::CampaignOptions opts;
  opts.parallelism = jobs;
  {
    py::gil_scoped_release release;
    for (auto& s : doc.scenarios) {
      if (runs) s.runs = *runs;
      summaries.push_back(aoa::mc::run_campaign(s, opts));
    }
  }
  return cells_list(summaries);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bearing-only source localization";

  static py::exception<aoa::Error> error(m, "AoaError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const aoa::Error& e) {
      py::set_error(error, (std::string(aoa::to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def("estimate_2d", &estimate_2d, py::arg("sensors"), py::arg("azimuth"), py::arg("sigma_a") = py::none(),
        py::arg("method") = "two-step", py::arg("gn_iters") = 1,
        "Planar estimate from sensor positions and azimuths (radians).");
  m.def("estimate_3d", &estimate_3d, py::arg("sensors"), py::arg("azimuth"), py::arg("elevation"),
        py::arg("sigma_a") = py::none(), py::arg("sigma_e") = py::none(), py::arg("method") = "two-step",
        py::arg("gn_iters") = 1);

  m.def(
      "synthesize_2d",
      [](const std::vector<Point2>& sensors, const Point2& source, double sigma_a, std::uint64_t seed) {
        return aoa::synthesize_measurements(array_2d(sensors), source, aoa::NoiseModel::known(sigma_a), seed)
            .azimuth;
      },
      py::arg("sensors"), py::arg("source"), py::arg("sigma_a"), py::arg("seed"));
  m.def(
      "synthesize_3d",
      [](const std::vector<Point3>& sensors, const Point3& source, double sigma_a, double sigma_e,
         std::uint64_t seed) {
        const auto meas = aoa::synthesize_measurements(array_3d(sensors), source,
                                                       aoa::NoiseModel::known(sigma_a, sigma_e), seed);
        return py::make_tuple(meas.azimuth, meas.elevation);
      },
      py::arg("sensors"), py::arg("source"), py::arg("sigma_a"), py::arg("sigma_e"), py::arg("seed"));

  m.def(
      "rcrlb_2d",
      [](const std::vector<Point2>& sensors, const Point2& source, double sigma_a) {
        return aoa::rcrlb(aoa::fisher_2d(array_2d(sensors), source, sigma_a));
      },
      py::arg("sensors"), py::arg("source"), py::arg("sigma_a"));
  m.def(
      "rcrlb_3d",
      [](const std::vector<Point3>& sensors, const Point3& source, double sigma_a, double sigma_e) {
        return aoa::rcrlb(aoa::fisher_3d(array_3d(sensors), source, sigma_a, sigma_e));
      },
      py::arg("sensors"), py::arg("source"), py::arg("sigma_a"), py::arg("sigma_e"));

  m.def("var_sin", &aoa::var_sin, py::arg("sigma"));
  m.def("sigma_from_var_sin", &aoa::sigma_from_var_sin, py::arg("v"));

  m.def("preset_names", &aoa::config::preset_names);
  m.def(
      "preset", [](const std::string& name) { return aoa::config::serialize_config(aoa::config::preset(name)); },
      py::arg("name"), "JSON text of a compiled-in preset.");
  m.def("run_campaign", &run_campaign_json, py::arg("config_json"), py::arg("runs") = py::none(),
        py::arg("jobs") = 1, "Runs every scenario of a JSON config; returns one dict per cell.");
}
