#include "aoa/model.hpp"

#include <sstream>

#include "aoa/rng.hpp"

namespace aoa {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::kIllConditioned: return "ill-conditioned";
    case ErrorKind::kOutOfRange: return "out-of-range";
    case ErrorKind::kInvalidScatter: return "invalid-scatter";
    case ErrorKind::kUndefinedCrlb: return "undefined-crlb";
    case ErrorKind::kUnidentifiableGeometry: return "unidentifiable-geometry";
    case ErrorKind::kUsage: return "usage";
  }
  return "unknown";
}

SensorArray2d project_to_plane(const SensorArray3d& array) {
  std::vector<Point2> planar;
  planar.reserve(array.size());
  for (const auto& p : array) planar.push_back({p[0], p[1]});
  return SensorArray2d(std::move(planar));
}

void NoiseModel::validate() const {
  for (const auto& s : {sigma_a, sigma_e}) {
    if (s && !(*s >= 0.0 && *s < std::numbers::pi)) {
      std::ostringstream os;
      os << "noise standard deviation " << *s << " outside [0, pi)";
      throw Error(ErrorKind::kOutOfRange, os.str());
    }
  }
}

double wrap_angle(double angle) {
  double w = std::remainder(angle, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

double true_bearing_2d(const Point2& sensor, const Point2& source) {
  const double dx = sensor[0] - source[0];
  const double dy = sensor[1] - source[1];
  if (std::hypot(dx, dy) < kCoincidenceTolerance) {
    throw Error(ErrorKind::kDegenerateGeometry, "sensor coincides with source");
  }
  const double a = std::atan2(dy, dx);
  // atan2 returns -pi for (-0, negative x); fold it into (-pi, pi].
  return a == -std::numbers::pi ? std::numbers::pi : a;
}

double true_elevation_3d(const Point3& sensor, const Point3& source) {
  const double r = std::hypot(sensor[0] - source[0], sensor[1] - source[1]);
  if (r < kCoincidenceTolerance) {
    throw Error(ErrorKind::kDegenerateGeometry, "sensor lies on the source's vertical line");
  }
  return std::atan2(sensor[2] - source[2], r);
}

namespace {

void require_known(const std::optional<double>& sigma, const char* name) {
  if (!sigma) {
    throw Error(ErrorKind::kUsage, std::string("synthesis needs a known ") + name);
  }
}

}  // namespace

MeasurementSet synthesize_measurements(const SensorArray2d& array, const Point2& source,
                                       const NoiseModel& noise, std::uint64_t rng_seed) {
  require_known(noise.sigma_a, "sigma_a");
  noise.validate();
  const double sa = *noise.sigma_a;
  MeasurementSet out;
  out.azimuth.resize(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) {
    const double a0 = true_bearing_2d(array[i], source);
    out.azimuth[i] = a0 + sa * rng::normal_pair(rng_seed, rng::Stream::kAngleNoise, i).first;
  }
  return out;
}

MeasurementSet synthesize_measurements(const SensorArray3d& array, const Point3& source,
                                       const NoiseModel& noise, std::uint64_t rng_seed) {
  require_known(noise.sigma_a, "sigma_a");
  require_known(noise.sigma_e, "sigma_e");
  noise.validate();
  const double sa = *noise.sigma_a;
  const double se = *noise.sigma_e;
  MeasurementSet out;
  out.azimuth.resize(array.size());
  out.elevation.resize(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) {
    const Point3& p = array[i];
    const double a0 = true_bearing_2d({p[0], p[1]}, {source[0], source[1]});
    const double e0 = true_elevation_3d(p, source);
    const auto [na, ne] = rng::normal_pair(rng_seed, rng::Stream::kAngleNoise, i);
    out.azimuth[i] = a0 + sa * na;
    out.elevation[i] = e0 + se * ne;
  }
  return out;
}

double sigma_from_var_sin(double v) {
  if (!(v >= 0.0 && v < 0.5)) {
    std::ostringstream os;
    os << "sine variance " << v << " outside [0, 1/2)";
    throw Error(ErrorKind::kOutOfRange, os.str());
  }
  return std::sqrt(-0.5 * std::log1p(-2.0 * v));
}

}  // namespace aoa
