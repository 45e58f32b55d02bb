#include "aoa/estimator2d.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace aoa {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kPls: return "PLS";
    case Method::kBels: return "BELS";
    case Method::kBelsGn: return "BELS+GN";
    case Method::kOracleUnbiased: return "OracleUB";
    case Method::kMlGrid: return "ML-grid";
  }
  return "unknown";
}

namespace {

void require_matching(std::size_t sensors, const MeasurementSet& meas) {
  if (meas.size() != sensors) {
    throw Error(ErrorKind::kUsage, "measurement count " + std::to_string(meas.size()) +
                                       " does not match sensor count " + std::to_string(sensors));
  }
}

void require_finite(const Point2& p) {
  if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
    throw Error(ErrorKind::kUsage, "initial point is not finite");
  }
}

}  // namespace

Regression2d::Regression2d(const SensorArray2d& array, const MeasurementSet& meas) {
  require_matching(array.size(), meas);
  const std::size_t n = array.size();
  rows_.resize(n);
  response_.resize(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0, bx = 0.0, by = 0.0, yy = 0.0;
  double px = 0.0, py = 0.0, pp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(meas.azimuth[i]);
    const double c = std::cos(meas.azimuth[i]);
    const Point2& p = array[i];
    const double y = s * p[0] - c * p[1];
    rows_[i] = {s, -c};
    response_[i] = y;
    sxx += s * s;
    sxy -= s * c;
    syy += c * c;
    bx += s * y;
    by -= c * y;
    yy += y * y;
    px += p[0];
    py += p[1];
    pp += p[0] * p[0] + p[1] * p[1];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  gram_(0, 0) = sxx * inv_n;
  gram_(0, 1) = gram_(1, 0) = sxy * inv_n;
  gram_(1, 1) = syy * inv_n;
  cross_ = {bx * inv_n, by * inv_n};
  response_energy_ = yy * inv_n;
  mean_sensor_ = {px * inv_n, py * inv_n};
  mean_squared_norm_ = pp * inv_n;
}

Estimate2d bels(const Regression2d& reg, double v_sin) {
  if (!(v_sin >= 0.0 && v_sin < 0.5)) {
    throw Error(ErrorKind::kOutOfRange, "sine variance must lie in [0, 1/2)");
  }
  num::Matrix<2, 2> a = reg.gram();
  a(0, 0) -= v_sin;
  a(1, 1) -= v_sin;
  const num::Vector<2> b = {reg.cross()[0] - v_sin * reg.mean_sensor()[0],
                            reg.cross()[1] - v_sin * reg.mean_sensor()[1]};
  Estimate2d est;
  est.method = Method::kBels;
  est.diagnostics.v_sin_a = v_sin;
  est.diagnostics.gram_condition = num::condition_number(a);
  est.position = num::solve_spd(a, b);
  return est;
}

Estimate2d pls(const Regression2d& reg) {
  // Same floating-point path as bels(reg, 0).
  Estimate2d est = bels(reg, 0.0);
  est.method = Method::kPls;
  est.diagnostics.v_sin_a.reset();
  return est;
}

SineVarianceEstimate estimate_var_sin_2d(const Regression2d& reg) {
  if (reg.size() < 4) {
    throw Error(ErrorKind::kUsage, "sine-variance estimation needs at least 4 measurements");
  }
  num::Matrix<3, 3> q;
  num::Matrix<3, 3> s;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) q(i, j) = reg.gram()(i, j);
    q(i, 2) = q(2, i) = reg.cross()[i];
    s(i, i) = 1.0;
    s(i, 2) = s(2, i) = reg.mean_sensor()[i];
  }
  q(2, 2) = reg.response_energy();
  s(2, 2) = reg.mean_squared_norm();

  double lambda = 0.0;
  try {
    lambda = num::max_gen_eigenvalue(q, s);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInvalidScatter) throw;
    throw Error(ErrorKind::kDegenerateGeometry, "all sensors coincide; sensor scatter is singular");
  }
  SineVarianceEstimate out;
  out.value = std::isinf(lambda) ? 0.0 : 1.0 / lambda;
  if (!(out.value >= 0.0)) {
    out.value = 0.0;
    out.clamped = true;
  } else if (out.value > kMaxSineVariance) {
    out.value = kMaxSineVariance;
    out.clamped = true;
  }
  return out;
}

Point2 bearing_gradient_2d(const Point2& sensor, const Point2& p) {
  const double dx = sensor[0] - p[0];
  const double dy = sensor[1] - p[1];
  const double r2 = dx * dx + dy * dy;
  return {dy / r2, -dx / r2};
}

double ml_objective_2d(const SensorArray2d& array, const MeasurementSet& meas, const Point2& p) {
  require_matching(array.size(), meas);
  double sum = 0.0;
  for (std::size_t i = 0; i < array.size(); ++i) {
    const double r = wrap_angle(meas.azimuth[i] - true_bearing_2d(array[i], p));
    sum += r * r;
  }
  return sum / static_cast<double>(array.size());
}

Estimate2d gn_refine_2d(const SensorArray2d& array, const MeasurementSet& meas,
                        const Point2& p_init, const GnOptions& options) {
  require_matching(array.size(), meas);
  require_finite(p_init);
  if (options.max_iters < 1) throw Error(ErrorKind::kUsage, "max_iters must be at least 1");

  Estimate2d est;
  est.method = Method::kBelsGn;
  est.position = p_init;
  Diagnostics& diag = est.diagnostics;
  const double n = static_cast<double>(array.size());
  for (int iter = 0; iter < options.max_iters; ++iter) {
    num::Matrix<2, 2> jtj;
    num::Vector<2> jtr{};
    double rss = 0.0;
    for (std::size_t i = 0; i < array.size(); ++i) {
      const Point2& s = array[i];
      const double dx = s[0] - est.position[0];
      const double dy = s[1] - est.position[1];
      const double r2 = dx * dx + dy * dy;
      if (std::sqrt(r2) < kCoincidenceTolerance) {
        throw Error(ErrorKind::kDegenerateGeometry, "Gauss-Newton iterate hit a sensor");
      }
      const double gx = dy / r2, gy = -dx / r2;
      const double res = wrap_angle(meas.azimuth[i] - std::atan2(dy, dx));
      jtj(0, 0) += gx * gx;
      jtj(0, 1) += gx * gy;
      jtj(1, 1) += gy * gy;
      jtr[0] += gx * res;
      jtr[1] += gy * res;
      rss += res * res;
    }
    jtj(1, 0) = jtj(0, 1);
    diag.gn_condition = num::condition_number(jtj);
    diag.gn_residual_rms = std::sqrt(rss / n);
    const num::Vector<2> step = num::solve_spd(jtj, jtr);
    est.position[0] += step[0];
    est.position[1] += step[1];
    diag.gn_step_norm = num::norm(step);
    diag.gn_iterations = iter + 1;
    if (diag.gn_step_norm < options.step_tolerance) break;
  }
  return est;
}

Estimate2d two_step_2d(const SensorArray2d& array, const MeasurementSet& meas,
                       const NoiseModel& noise,
                       const GnOptions& options) {
  noise.validate();
  if (array.size() < 4) throw Error(ErrorKind::kUsage, "two-step estimation needs n >= 4");
  const Regression2d reg(array, meas);
  double v = 0.0;
  bool estimated = false, clamped = false;
  if (noise.sigma_a) {
    v = var_sin(*noise.sigma_a);
  } else {
    const SineVarianceEstimate ve = estimate_var_sin_2d(reg);
    v = ve.value;
    clamped = ve.clamped;
    estimated = true;
  }
  const Estimate2d first = bels(reg, v);
  Estimate2d out = gn_refine_2d(array, meas, first.position, options);
  out.diagnostics.v_sin_a = v;
  out.diagnostics.v_sin_a_estimated = estimated;
  out.diagnostics.v_sin_clamped = clamped;
  out.diagnostics.gram_condition = first.diagnostics.gram_condition;
  return out;
}

}  // namespace aoa
