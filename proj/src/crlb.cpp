#include "aoa/crlb.hpp"

#include <cmath>

#include "aoa/estimator2d.hpp"
#include "aoa/estimator3d.hpp"

namespace aoa {

namespace {

void require_positive_sigma(double sigma, const char* name) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::kUndefinedCrlb,
                std::string("CRLB is undefined for ") + name + " that is not positive");
  }
}

template <std::size_t D>
num::Matrix<D, D> inverse_fisher(const FisherInfo<D>& f) {
  try {
    return num::inverse_spd(f.matrix);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kIllConditioned) throw;
    throw Error(ErrorKind::kUnidentifiableGeometry,
                "Fisher information is singular; sensors and source are collinear",
                e.condition());
  }
}

}  // namespace

FisherInfo2d fisher_2d(const SensorArray2d& array, const Point2& source, double sigma_a,
                       std::size_t multiplicity) {
  require_positive_sigma(sigma_a, "sigma_a");
  FisherInfo2d f;
  for (const Point2& s : array) {
    true_bearing_2d(s, source);  // rejects coincident sensors
    const Point2 g = bearing_gradient_2d(s, source);
    f.matrix(0, 0) += g[0] * g[0];
    f.matrix(0, 1) += g[0] * g[1];
    f.matrix(1, 1) += g[1] * g[1];
  }
  f.matrix(1, 0) = f.matrix(0, 1);
  f.matrix *= static_cast<double>(multiplicity) / (sigma_a * sigma_a);
  f.n = array.size() * multiplicity;
  f.sigma_a = sigma_a;
  return f;
}

FisherInfo3d fisher_3d(const SensorArray3d& array, const Point3& source, double sigma_a,
                       double sigma_e, std::size_t multiplicity) {
  require_positive_sigma(sigma_a, "sigma_a");
  require_positive_sigma(sigma_e, "sigma_e");
  FisherInfo3d f;
  const double wa = 1.0 / sigma_a, we = 1.0 / sigma_e;
  for (const Point3& s : array) {
    true_elevation_3d(s, source);  // rejects sensors on the source's vertical
    const AngleJacobian3d j = angle_jacobian_3d(s, source);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a; b < 3; ++b)
        f.matrix(a, b) += wa * wa * j.azimuth[a] * j.azimuth[b] +
                          we * we * j.elevation[a] * j.elevation[b];
  }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < a; ++b) f.matrix(a, b) = f.matrix(b, a);
  f.matrix *= static_cast<double>(multiplicity);
  f.n = array.size() * multiplicity;
  f.sigma_a = sigma_a;
  f.sigma_e = sigma_e;
  return f;
}

template <std::size_t D>
double rcrlb(const FisherInfo<D>& f) {
  const num::Matrix<D, D> inv = inverse_fisher(f);
  double trace = 0.0;
  for (std::size_t i = 0; i < D; ++i) trace += inv(i, i);
  return std::sqrt(trace);
}

template <std::size_t D>
double rcrlb_component(const FisherInfo<D>& f, std::size_t k) {
  if (k >= D) throw Error(ErrorKind::kUsage, "coordinate index out of range");
  return std::sqrt(inverse_fisher(f)(k, k));
}

template double rcrlb<2>(const FisherInfo<2>&);
template double rcrlb<3>(const FisherInfo<3>&);
template double rcrlb_component<2>(const FisherInfo<2>&, std::size_t);
template double rcrlb_component<3>(const FisherInfo<3>&, std::size_t);

}  // namespace aoa
