#pragma once

// Planar estimators. The measurement model is rewritten as the linear
// regression  h_i' p_i = h_i' p + r_i sin(eps_i)  with h_i = [sin a_i, -cos a_i],
// whose plain LS solution is biased because h_i carries the noise. The bias
// depends only on V(sin eps) and the mean sensor position, so subtracting it
// from the normal equations gives a sqrt(n)-consistent estimate, which one
// Gauss-Newton step on the ML objective then makes asymptotically efficient.

#include <span>
#include <vector>

#include "aoa/estimate.hpp"
#include "aoa/model.hpp"
#include "aoa/numerics.hpp"

namespace aoa {

class Regression2d {
 public:
  Regression2d(const SensorArray2d& array, const MeasurementSet& meas);

  std::size_t size() const { return response_.size(); }
  // Row i of X, [sin a_i, -cos a_i].
  std::span<const num::Vector<2>> rows() const { return rows_; }
  // Y_i = h_i' p_i.
  std::span<const double> response() const { return response_; }

  const Point2& mean_sensor() const { return mean_sensor_; }
  double mean_squared_norm() const { return mean_squared_norm_; }
  const num::Matrix<2, 2>& gram() const { return gram_; }  // X'X / n
  const num::Vector<2>& cross() const { return cross_; }   // X'Y / n
  double response_energy() const { return response_energy_; }  // Y'Y / n

 private:
  std::vector<num::Vector<2>> rows_;
  std::vector<double> response_;
  Point2 mean_sensor_{};
  double mean_squared_norm_ = 0.0;
  num::Matrix<2, 2> gram_;
  num::Vector<2> cross_{};
  double response_energy_ = 0.0;
};

inline Regression2d build_regression(const SensorArray2d& array, const MeasurementSet& meas) {
  return Regression2d(array, meas);
}

// (X'X)^-1 X'Y.
Estimate2d pls(const Regression2d& reg);

// (X'X/n - v I)^-1 (X'Y/n - v p_bar).
Estimate2d bels(const Regression2d& reg, double v_sin);

// 1 / lambda_max(Q^-1 S) with Q = [X Y]'[X Y]/n and
// S = [[I, p_bar], [p_bar', mean |p_i|^2]], clamped to [0, 1/2).
SineVarianceEstimate estimate_var_sin_2d(const Regression2d& reg);

// Gradient of the bearing atan2(y_i - y, x_i - x) with respect to (x, y).
Point2 bearing_gradient_2d(const Point2& sensor, const Point2& p);

// Mean squared wrapped bearing residual at p.
double ml_objective_2d(const SensorArray2d& array, const MeasurementSet& meas, const Point2& p);

// Gauss-Newton on the bearing residuals, wrapped to (-pi, pi].
Estimate2d gn_refine_2d(const SensorArray2d& array, const MeasurementSet& meas,
                        const Point2& p_init, const GnOptions& options = {});

// BELS with known or estimated sine variance followed by Gauss-Newton (one
// step by default).
Estimate2d two_step_2d(const SensorArray2d& array, const MeasurementSet& meas,
                       const NoiseModel& noise,
                       const GnOptions& options = {});

}  // namespace aoa
