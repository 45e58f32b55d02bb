#pragma once

// Domain types for bearing-only localization and the measurement model:
// full-circle azimuths a = atan2(y_i - y, x_i - x) of the source-to-sensor
// vector, elevations e = atan2(z_i - z, r_i), and Gaussian angle noise.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "aoa/error.hpp"

namespace aoa {

template <std::size_t D>
using Point = std::array<double, D>;
using Point2 = Point<2>;
using Point3 = Point<3>;

// Distances below this are treated as coincident points.
inline constexpr double kCoincidenceTolerance = 1e-9;

template <std::size_t D>
class SensorArray {
  static_assert(D == 2 || D == 3);

 public:
  static constexpr std::size_t kMinSensors = 3;

  explicit SensorArray(std::vector<Point<D>> positions) : positions_(std::move(positions)) {
    if (positions_.size() < kMinSensors) {
      throw Error(ErrorKind::kUsage, "sensor array needs at least 3 sensors");
    }
    for (const auto& p : positions_) {
      for (double c : p) {
        if (!std::isfinite(c)) throw Error(ErrorKind::kUsage, "sensor coordinate is not finite");
      }
    }
  }

  static constexpr std::size_t dim() { return D; }
  std::size_t size() const { return positions_.size(); }
  const Point<D>& operator[](std::size_t i) const { return positions_[i]; }
  std::span<const Point<D>> positions() const { return positions_; }

  auto begin() const { return positions_.begin(); }
  auto end() const { return positions_.end(); }

 private:
  std::vector<Point<D>> positions_;
};

using SensorArray2d = SensorArray<2>;
using SensorArray3d = SensorArray<3>;

// Drops the z coordinate of every sensor.
SensorArray2d project_to_plane(const SensorArray3d& array);

// Gaussian angle-noise standard deviations in radians. An empty optional means
// "unknown, estimate from the data".
struct NoiseModel {
  std::optional<double> sigma_a;
  std::optional<double> sigma_e;

  static NoiseModel known(double sigma_a, std::optional<double> sigma_e = std::nullopt) {
    NoiseModel m{sigma_a, sigma_e};
    m.validate();
    return m;
  }
  static NoiseModel unknown() { return {}; }

  // Throws kOutOfRange unless every known sigma lies in [0, pi).
  void validate() const;
};

// Noisy angles, one per sensor. `elevation` is empty for 2-D data. Azimuths
// are stored unwrapped (true bearing plus noise).
struct MeasurementSet {
  std::vector<double> azimuth;
  std::vector<double> elevation;

  std::size_t size() const { return azimuth.size(); }
  bool has_elevation() const { return !elevation.empty(); }
  friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;
};

// Maps an angle to (-pi, pi].
double wrap_angle(double angle);

double true_bearing_2d(const Point2& sensor, const Point2& source);
double true_elevation_3d(const Point3& sensor, const Point3& source);

MeasurementSet synthesize_measurements(const SensorArray2d& array, const Point2& source,
                                       const NoiseModel& noise, std::uint64_t rng_seed);
MeasurementSet synthesize_measurements(const SensorArray3d& array, const Point3& source,
                                       const NoiseModel& noise, std::uint64_t rng_seed);

// Closed-form moments of sin/cos of a N(0, sigma^2) variable.
inline double mean_cos(double sigma) { return std::exp(-0.5 * sigma * sigma); }
inline double var_sin(double sigma) { return -0.5 * std::expm1(-2.0 * sigma * sigma); }
inline double var_cos(double sigma) {
  const double e1 = std::expm1(-sigma * sigma);
  // (e^{-2s^2} + 1 - 2e^{-s^2}) / 2 = (e^{-s^2} - 1)^2 / 2
  return 0.5 * e1 * e1;
}

// Inverse of var_sin on [0, 1/2).
double sigma_from_var_sin(double v);

}  // namespace aoa
