#pragma once

// Test-only reference computations. Each one is written from the defining
// formula with plain loops so it shares no code path with the library
// routine it checks.

#include <cstdint>
#include <vector>

#include "aoa/estimator3d.hpp"
#include "aoa/model.hpp"
#include "aoa/numerics.hpp"

namespace aoa::oracle {

// Sensor sites of the fixed-array experiments.
std::vector<Point2> sites_2d();
std::vector<Point3> sites_3d();
// Each site repeated `rounds` times, round-major.
SensorArray2d replicate(const std::vector<Point2>& sites, std::size_t rounds);
SensorArray3d replicate(const std::vector<Point3>& sites, std::size_t rounds);

inline const Point2 kSource2d = {60.0, 10.0};
inline const Point3 kSource3d = {60.0, 10.0, 10.0};

// 2x2 solve by Cramer's rule.
Point2 cramer(double a00, double a01, double a11, double b0, double b1);

// LS with the noise-free regressors e^{-s^2/2}[sin a0, -cos a0].
Point2 unbiased_ls_2d(const SensorArray2d& array, const Point2& source, const MeasurementSet& meas,
                      double sigma_a);

// Bias-eliminated LS straight from its closed form.
Point2 bels_naive(const SensorArray2d& array, const MeasurementSet& meas, double v_sin);

// LS for z with the noise-free regressor e^{-s^2/2}(-cos e0) and true ranges.
double unbiased_z(const SensorArray3d& array, const Point3& source, const MeasurementSet& meas,
                  double sigma_e);

// 1 / lambda_max(Q^-1 S) with Q inverted by its adjugate and lambda found by
// power iteration.
double var_sin_naive(const SensorArray2d& array, const MeasurementSet& meas);

struct Box {
  double xmin, xmax, ymin, ymax;
};

// Grid search of the ML objective followed by Gauss-Newton to convergence.
Point2 ml_grid_2d(const SensorArray2d& array, const MeasurementSet& meas, const Box& box,
                  int resolution);

// Central differences of the angle functions.
Point2 fd_bearing_gradient(const Point2& sensor, const Point2& p, double h = 1e-6);
AngleJacobian3d fd_angle_jacobian_3d(const Point3& sensor, const Point3& p, double h = 1e-6);

// Sample covariance of the log-likelihood score at the true source.
num::Matrix<2, 2> score_covariance_2d(const SensorArray2d& array, const Point2& source,
                                      double sigma_a, int draws, std::uint64_t seed);
num::Matrix<3, 3> score_covariance_3d(const SensorArray3d& array, const Point3& source,
                                      double sigma_a, double sigma_e, int draws,
                                      std::uint64_t seed);

}  // namespace aoa::oracle
