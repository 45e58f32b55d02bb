#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>

#include "aoa/model.hpp"

namespace aoa {

enum class Method { kPls, kBels, kBelsGn, kOracleUnbiased, kMlGrid };

std::string_view to_string(Method method);

struct Diagnostics {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  // Sine variances fed to the bias correction, and whether they came from data.
  std::optional<double> v_sin_a;
  std::optional<double> v_sin_e;
  bool v_sin_a_estimated = false;
  bool v_sin_e_estimated = false;
  // Set when a data-driven sine variance had to be clamped into [0, 1/2).
  bool v_sin_clamped = false;

  double gram_condition = kUnset;  // of the (bias-corrected) planar Gram matrix
  double z_denominator = kUnset;   // Phi'Phi/n - v_e for the z estimate
  double gn_condition = kUnset;    // of J'J at the last Gauss-Newton step
  double gn_step_norm = kUnset;
  double gn_residual_rms = kUnset;  // weighted residual RMS before the last step
  int gn_iterations = 0;
};

template <std::size_t D>
struct Estimate {
  Point<D> position{};
  Method method = Method::kPls;
  Diagnostics diagnostics;
};

using Estimate2d = Estimate<2>;
using Estimate3d = Estimate<3>;

// Result of a pencil-based sine-variance estimate.
struct SineVarianceEstimate {
  double value = 0.0;
  bool clamped = false;
};

// Upper clamp for data-driven sine variances.
inline constexpr double kMaxSineVariance = 0.5 - 1e-9;

struct GnOptions {
  int max_iters = 1;
  // Stop early once the step norm falls below this (0 disables).
  double step_tolerance = 0.0;
};

}  // namespace aoa
