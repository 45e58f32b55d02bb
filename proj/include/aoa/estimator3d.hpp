#pragma once

// Three-dimensional pipeline. The horizontal coordinates come from the planar
// estimator applied to azimuths. The height follows from the elevation
// regression
//   sin(e_i) r_i - cos(e_i) z_i = -cos(e_i) z + d_i sin(eps_i^e),
// with the unknown planar ranges r_i replaced by plug-in ranges from the
// planar estimate, bias-corrected exactly like the planar case. A single
// Gauss-Newton step over all three coordinates finishes the estimate.

#include <span>
#include <vector>

#include "aoa/estimate.hpp"
#include "aoa/model.hpp"
#include "aoa/numerics.hpp"

namespace aoa {

// Planar BELS on the z-dropped array and the azimuths.
Point2 planar_bels_3d(const SensorArray3d& array, const MeasurementSet& meas, double v_sin_a);

// Horizontal distance from every sensor to `planar_estimate`.
std::vector<double> plug_in_ranges(const SensorArray3d& array, const Point2& planar_estimate);

class ZRegression {
 public:
  ZRegression(const SensorArray3d& array, const MeasurementSet& meas,
              const Point2& planar_estimate);

  std::size_t size() const { return phi_.size(); }
  const Point2& planar_estimate() const { return planar_estimate_; }
  std::span<const double> phi() const { return phi_; }              // -cos e_i
  std::span<const double> gamma_hat() const { return gamma_hat_; }  // sin e_i r_i - cos e_i z_i
  std::span<const double> r_hat() const { return r_hat_; }
  double z_bar() const { return z_bar_; }
  double mean_z_sq_plus_r_sq() const { return mean_z_sq_plus_r_sq_; }
  double phi_phi() const { return phi_phi_; }        // Phi'Phi / n
  double phi_gamma() const { return phi_gamma_; }    // Phi'Gamma / n
  double gamma_gamma() const { return gamma_gamma_; }  // Gamma'Gamma / n

 private:
  Point2 planar_estimate_{};
  std::vector<double> phi_;
  std::vector<double> gamma_hat_;
  std::vector<double> r_hat_;
  double z_bar_ = 0.0;
  double mean_z_sq_plus_r_sq_ = 0.0;
  double phi_phi_ = 0.0;
  double phi_gamma_ = 0.0;
  double gamma_gamma_ = 0.0;
};

// (Phi'Phi/n - v)^-1 (Phi'Gamma/n - v z_bar).
double bels_z(const ZRegression& zreg, double v_sin_e);

// 1 / lambda_max(R^-1 U) with R = [Phi Gamma]'[Phi Gamma]/n and
// U = [[1, z_bar], [z_bar, mean(z_i^2 + r_i^2)]], clamped to [0, 1/2).
SineVarianceEstimate estimate_var_sin_e(const ZRegression& zreg);

// Jacobian rows of (azimuth, elevation) with respect to (x, y, z), unweighted.
struct AngleJacobian3d {
  Point3 azimuth{};
  Point3 elevation{};
};
AngleJacobian3d angle_jacobian_3d(const Point3& sensor, const Point3& p);

// Gauss-Newton over the stacked azimuth/elevation residuals, rows weighted by
// 1/sigma_a and 1/sigma_e. Azimuth residuals are wrapped; elevation residuals
// are not.
Estimate3d gn_refine_3d(const SensorArray3d& array, const MeasurementSet& meas, double sigma_a,
                        double sigma_e, const Point3& p_init, const GnOptions& options = {});

// Planar LS plus the uncorrected z regression on PLS plug-in ranges.
Estimate3d pls_3d(const SensorArray3d& array, const MeasurementSet& meas);

// Bias-eliminated estimate for given sine variances (no Gauss-Newton).
Estimate3d bels_3d(const SensorArray3d& array, const MeasurementSet& meas, double v_sin_a,
                   double v_sin_e);

// Full pipeline: planar BELS, z BELS with known or estimated elevation sine
// variance, then Gauss-Newton (one step by default). Unknown sigmas used for weighting are
// recovered from the estimated sine variances.
Estimate3d two_step_3d(const SensorArray3d& array, const MeasurementSet& meas,
                       const NoiseModel& noise,
                       const GnOptions& options = {});

}  // namespace aoa
