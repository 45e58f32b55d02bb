#include "aoa/estimator3d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aoa/estimator2d.hpp"

namespace aoa {

namespace {

void require_3d_measurements(const SensorArray3d& array, const MeasurementSet& meas) {
  if (meas.azimuth.size() != array.size() || meas.elevation.size() != array.size()) {
    throw Error(ErrorKind::kUsage, "3-D estimation needs one azimuth and one elevation per sensor (" +
                                       std::to_string(array.size()) + " sensors)");
  }
}

SineVarianceEstimate clamp_pencil_estimate(double lambda) {
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

// Unit weights when both sigmas are zero; otherwise each sigma is floored at
// 1e-4 of the larger one so an exact channel cannot swamp J'J.
std::pair<double, double> gn_weights(double sigma_a, double sigma_e) {
  const double top = std::max(sigma_a, sigma_e);
  if (top == 0.0) return {1.0, 1.0};
  const double floor = 1e-4 * top;
  return {1.0 / std::max(sigma_a, floor), 1.0 / std::max(sigma_e, floor)};
}

}  // namespace

Point2 planar_bels_3d(const SensorArray3d& array, const MeasurementSet& meas, double v_sin_a) {
  require_3d_measurements(array, meas);
  return bels(Regression2d(project_to_plane(array), meas), v_sin_a).position;
}

std::vector<double> plug_in_ranges(const SensorArray3d& array, const Point2& planar_estimate) {
  std::vector<double> r(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) {
    r[i] = std::hypot(array[i][0] - planar_estimate[0], array[i][1] - planar_estimate[1]);
  }
  return r;
}

ZRegression::ZRegression(const SensorArray3d& array, const MeasurementSet& meas,
                         const Point2& planar_estimate)
    : planar_estimate_(planar_estimate), r_hat_(plug_in_ranges(array, planar_estimate)) {
  require_3d_measurements(array, meas);
  const std::size_t n = array.size();
  phi_.resize(n);
  gamma_hat_.resize(n);
  double zs = 0.0, zr = 0.0, pp = 0.0, pg = 0.0, gg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(meas.elevation[i]);
    const double c = std::cos(meas.elevation[i]);
    const double z = array[i][2];
    const double phi = -c;
    const double gamma = s * r_hat_[i] - c * z;
    phi_[i] = phi;
    gamma_hat_[i] = gamma;
    zs += z;
    zr += z * z + r_hat_[i] * r_hat_[i];
    pp += phi * phi;
    pg += phi * gamma;
    gg += gamma * gamma;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  z_bar_ = zs * inv_n;
  mean_z_sq_plus_r_sq_ = zr * inv_n;
  phi_phi_ = pp * inv_n;
  phi_gamma_ = pg * inv_n;
  gamma_gamma_ = gg * inv_n;
}

double bels_z(const ZRegression& zreg, double v_sin_e) {
  if (!(v_sin_e >= 0.0 && v_sin_e < 0.5)) {
    throw Error(ErrorKind::kOutOfRange, "sine variance must lie in [0, 1/2)");
  }
  const double denom = zreg.phi_phi() - v_sin_e;
  if (!(denom > zreg.phi_phi() / num::kMaxCondition)) {
    const double cond = denom > 0.0 ? zreg.phi_phi() / denom : std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::kIllConditioned,
                "z regression is not positive after bias subtraction", cond);
  }
  return (zreg.phi_gamma() - v_sin_e * zreg.z_bar()) / denom;
}

SineVarianceEstimate estimate_var_sin_e(const ZRegression& zreg) {
  if (zreg.size() < 3) {
    throw Error(ErrorKind::kUsage, "elevation sine-variance estimation needs n >= 3");
  }
  num::Matrix<2, 2> r;
  r(0, 0) = zreg.phi_phi();
  r(0, 1) = r(1, 0) = zreg.phi_gamma();
  r(1, 1) = zreg.gamma_gamma();
  num::Matrix<2, 2> u;
  u(0, 0) = 1.0;
  u(0, 1) = u(1, 0) = zreg.z_bar();
  u(1, 1) = zreg.mean_z_sq_plus_r_sq();
  try {
    return clamp_pencil_estimate(num::max_gen_eigenvalue(r, u));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInvalidScatter) throw;
    throw Error(ErrorKind::kDegenerateGeometry, "elevation scatter matrix is singular");
  }
}

AngleJacobian3d angle_jacobian_3d(const Point3& sensor, const Point3& p) {
  const double dx = sensor[0] - p[0];
  const double dy = sensor[1] - p[1];
  const double dz = sensor[2] - p[2];
  const double r2 = dx * dx + dy * dy;
  const double r = std::sqrt(r2);
  const double d2 = r2 + dz * dz;
  AngleJacobian3d j;
  j.azimuth = {dy / r2, -dx / r2, 0.0};
  j.elevation = {dx * dz / (r * d2), dy * dz / (r * d2), -r / d2};
  return j;
}

Estimate3d gn_refine_3d(const SensorArray3d& array, const MeasurementSet& meas, double sigma_a,
                        double sigma_e, const Point3& p_init, const GnOptions& options) {
  require_3d_measurements(array, meas);
  for (double c : p_init) {
    if (!std::isfinite(c)) throw Error(ErrorKind::kUsage, "initial point is not finite");
  }
  if (!(sigma_a >= 0.0) || !(sigma_e >= 0.0) || !std::isfinite(sigma_a) || !std::isfinite(sigma_e)) {
    throw Error(ErrorKind::kOutOfRange, "Gauss-Newton weights need finite non-negative sigmas");
  }
  if (options.max_iters < 1) throw Error(ErrorKind::kUsage, "max_iters must be at least 1");
  const auto [wa, we] = gn_weights(sigma_a, sigma_e);

  Estimate3d est;
  est.method = Method::kBelsGn;
  est.position = p_init;
  Diagnostics& diag = est.diagnostics;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    num::Matrix<3, 3> jtj;
    num::Vector<3> jtr{};
    double rss = 0.0;
    for (std::size_t i = 0; i < array.size(); ++i) {
      const Point3& s = array[i];
      const double dx = s[0] - est.position[0];
      const double dy = s[1] - est.position[1];
      const double r = std::hypot(dx, dy);
      if (r < kCoincidenceTolerance) {
        throw Error(ErrorKind::kDegenerateGeometry,
                    "Gauss-Newton iterate lies on a sensor's vertical line");
      }
      const AngleJacobian3d j = angle_jacobian_3d(s, est.position);
      const double ra = wa * wrap_angle(meas.azimuth[i] - std::atan2(dy, dx));
      const double re = we * (meas.elevation[i] - std::atan2(s[2] - est.position[2], r));
      for (std::size_t a = 0; a < 3; ++a) {
        const double ga = wa * j.azimuth[a];
        const double ge = we * j.elevation[a];
        jtr[a] += ga * ra + ge * re;
        for (std::size_t b = a; b < 3; ++b) {
          jtj(a, b) += ga * wa * j.azimuth[b] + ge * we * j.elevation[b];
        }
      }
      rss += ra * ra + re * re;
    }
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < a; ++b) jtj(a, b) = jtj(b, a);
    diag.gn_condition = num::condition_number(jtj);
    diag.gn_residual_rms = std::sqrt(rss / (2.0 * static_cast<double>(array.size())));
    const num::Vector<3> step = num::solve_spd(jtj, jtr);
    for (std::size_t a = 0; a < 3; ++a) est.position[a] += step[a];
    diag.gn_step_norm = num::norm(step);
    diag.gn_iterations = iter + 1;
    if (diag.gn_step_norm < options.step_tolerance) break;
  }
  return est;
}

Estimate3d pls_3d(const SensorArray3d& array, const MeasurementSet& meas) {
  require_3d_measurements(array, meas);
  const Estimate2d planar = pls(Regression2d(project_to_plane(array), meas));
  const ZRegression zreg(array, meas, planar.position);
  Estimate3d est;
  est.method = Method::kPls;
  est.position = {planar.position[0], planar.position[1], bels_z(zreg, 0.0)};
  est.diagnostics.gram_condition = planar.diagnostics.gram_condition;
  est.diagnostics.z_denominator = zreg.phi_phi();
  return est;
}

Estimate3d bels_3d(const SensorArray3d& array, const MeasurementSet& meas, double v_sin_a,
                   double v_sin_e) {
  require_3d_measurements(array, meas);
  const Estimate2d planar = bels(Regression2d(project_to_plane(array), meas), v_sin_a);
  const ZRegression zreg(array, meas, planar.position);
  Estimate3d est;
  est.method = Method::kBels;
  est.position = {planar.position[0], planar.position[1], bels_z(zreg, v_sin_e)};
  est.diagnostics.v_sin_a = v_sin_a;
  est.diagnostics.v_sin_e = v_sin_e;
  est.diagnostics.gram_condition = planar.diagnostics.gram_condition;
  est.diagnostics.z_denominator = zreg.phi_phi() - v_sin_e;
  return est;
}

Estimate3d two_step_3d(const SensorArray3d& array, const MeasurementSet& meas,
                       const NoiseModel& noise,
                       const GnOptions& options) {
  noise.validate();
  require_3d_measurements(array, meas);
  if (array.size() < 4) throw Error(ErrorKind::kUsage, "two-step estimation needs n >= 4");

  Diagnostics diag;
  const Regression2d reg(project_to_plane(array), meas);
  double va = 0.0;
  if (noise.sigma_a) {
    va = var_sin(*noise.sigma_a);
  } else {
    const SineVarianceEstimate est = estimate_var_sin_2d(reg);
    va = est.value;
    diag.v_sin_clamped |= est.clamped;
    diag.v_sin_a_estimated = true;
  }
  const Estimate2d planar = bels(reg, va);
  const ZRegression zreg(array, meas, planar.position);
  double ve = 0.0;
  if (noise.sigma_e) {
    ve = var_sin(*noise.sigma_e);
  } else {
    const SineVarianceEstimate est = estimate_var_sin_e(zreg);
    ve = est.value;
    diag.v_sin_clamped |= est.clamped;
    diag.v_sin_e_estimated = true;
  }
  const double z = bels_z(zreg, ve);
  const double sa = noise.sigma_a ? *noise.sigma_a : sigma_from_var_sin(va);
  const double se = noise.sigma_e ? *noise.sigma_e : sigma_from_var_sin(ve);

  Estimate3d out =
      gn_refine_3d(array, meas, sa, se, {planar.position[0], planar.position[1], z}, options);
  diag.v_sin_a = va;
  diag.v_sin_e = ve;
  diag.gram_condition = planar.diagnostics.gram_condition;
  diag.z_denominator = zreg.phi_phi() - ve;
  diag.gn_condition = out.diagnostics.gn_condition;
  diag.gn_step_norm = out.diagnostics.gn_step_norm;
  diag.gn_residual_rms = out.diagnostics.gn_residual_rms;
  diag.gn_iterations = out.diagnostics.gn_iterations;
  out.diagnostics = diag;
  return out;
}

}  // namespace aoa
