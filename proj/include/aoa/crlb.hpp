#pragma once

#include <cstddef>

#include "aoa/model.hpp"
#include "aoa/numerics.hpp"

namespace aoa {

template <std::size_t D>
struct FisherInfo {
  num::Matrix<D, D> matrix;
  std::size_t n = 0;
  double sigma_a = 0.0;
  double sigma_e = 0.0;  // 3-D only
};

using FisherInfo2d = FisherInfo<2>;
using FisherInfo3d = FisherInfo<3>;

// F = sigma_a^-2 sum_i g_i g_i' with g_i the bearing gradient at the source.
// `multiplicity` counts repeated measurements per sensor (F scales linearly).
FisherInfo2d fisher_2d(const SensorArray2d& array, const Point2& source, double sigma_a,
                       std::size_t multiplicity = 1);

// Sum of J_i'J_i over the sigma-weighted azimuth/elevation Jacobian rows.
FisherInfo3d fisher_3d(const SensorArray3d& array, const Point3& source, double sigma_a,
                       double sigma_e, std::size_t multiplicity = 1);

// sqrt(tr F^-1); kUnidentifiableGeometry when F is singular or cond > 1e12.
template <std::size_t D>
double rcrlb(const FisherInfo<D>& f);

// sqrt((F^-1)_kk), the bound on one coordinate.
template <std::size_t D>
double rcrlb_component(const FisherInfo<D>& f, std::size_t k);

}  // namespace aoa
