#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "aoa/model.hpp"
#include "aoa/rng.hpp"
#include "support/expect.hpp"

namespace aoa {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(TrueBearing, HandValues) {
  EXPECT_NEAR(true_bearing_2d({10, 0}, {5, 5}), -kPi / 4, 1e-15);
  EXPECT_EQ(true_bearing_2d({1, 0}, {0, 0}), 0.0);
  EXPECT_NEAR(true_bearing_2d({0, 0}, {5, 5}), -3 * kPi / 4, 1e-15);
}

TEST(TrueBearing, NegativeXAxisMapsToPlusPi) {
  EXPECT_EQ(true_bearing_2d({-1, 0}, {0, 0}), kPi);
  EXPECT_EQ(true_bearing_2d({-1, -0.0}, {0, 0}), kPi);
}

TEST(TrueBearing, CoincidentIsDegenerate) {
  EXPECT_AOA_ERROR(true_bearing_2d({1, 1}, {1, 1 + 1e-12}), ErrorKind::kDegenerateGeometry);
}

TEST(TrueElevation, HandValues) {
  EXPECT_NEAR(true_elevation_3d({1, 0, 1}, {0, 0, 0}), kPi / 4, 1e-15);
  EXPECT_EQ(true_elevation_3d({1, 0, 0}, {0, 0, 0}), 0.0);
  EXPECT_NEAR(true_elevation_3d({0, 3, -4}, {0, 0, 0}), std::atan(-4.0 / 3.0), 1e-15);
  EXPECT_NEAR(true_elevation_3d({0, 3, -4}, {0, 0, 0}), -0.9273, 1e-4);
}

TEST(TrueElevation, VerticalLineIsDegenerate) {
  EXPECT_AOA_ERROR(true_elevation_3d({2, 3, 10}, {2, 3, 0}), ErrorKind::kDegenerateGeometry);
}

TEST(AngleIdentities, PlanarResidualsVanish) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-200.0, 200.0);
  for (int i = 0; i < 10000; ++i) {
    const Point2 s = {u(gen), u(gen)}, p = {u(gen), u(gen)};
    const double a = true_bearing_2d(s, p);
    const double dx = s[0] - p[0], dy = s[1] - p[1];
    const double r = std::hypot(dx, dy);
    EXPECT_LT(std::abs(dx * std::sin(a) - dy * std::cos(a)), 1e-10 * r);
    EXPECT_NEAR(dx * std::cos(a) + dy * std::sin(a), r, 1e-10 * r);
  }
}

TEST(AngleIdentities, ElevationResidualsVanish) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-200.0, 200.0);
  for (int i = 0; i < 10000; ++i) {
    const Point3 s = {u(gen), u(gen), u(gen)}, p = {u(gen), u(gen), u(gen)};
    const double e = true_elevation_3d(s, p);
    const double r = std::hypot(s[0] - p[0], s[1] - p[1]);
    const double dz = s[2] - p[2];
    const double d = std::hypot(r, dz);
    EXPECT_LT(std::abs(r * std::sin(e) - dz * std::cos(e)), 1e-10 * d);
    EXPECT_NEAR(r * std::cos(e) + dz * std::sin(e), d, 1e-10 * d);
  }
}

TEST(WrapAngle, MapsIntoHalfOpenInterval) {
  EXPECT_EQ(wrap_angle(kPi), kPi);
  EXPECT_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(2 * kPi + 0.5), 0.5, 1e-12);
  EXPECT_NEAR(wrap_angle(-2 * kPi - 0.5), -0.5, 1e-12);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(u(gen));
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
  }
}

SensorArray2d ring(std::size_t n) {
  std::vector<Point2> s;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    s.push_back({100 * std::cos(t), 100 * std::sin(t)});
  }
  return SensorArray2d(s);
}

TEST(SensorArray, RejectsTooFewOrNonFinite) {
  EXPECT_AOA_ERROR(SensorArray2d({{0, 0}, {1, 1}}), ErrorKind::kUsage);
  EXPECT_AOA_ERROR(SensorArray2d({{0, 0}, {1, 1}, {NAN, 0}}), ErrorKind::kUsage);
}

TEST(NoiseModel, ValidatesRange) {
  EXPECT_NO_THROW(NoiseModel::known(0.0));
  EXPECT_AOA_ERROR(NoiseModel::known(-0.1), ErrorKind::kOutOfRange);
  EXPECT_AOA_ERROR(NoiseModel::known(kPi), ErrorKind::kOutOfRange);
  EXPECT_AOA_ERROR(NoiseModel::known(0.1, 4.0), ErrorKind::kOutOfRange);
}

TEST(Synthesize, ZeroNoiseGivesTrueBearings) {
  const auto array = ring(50);
  const Point2 src = {30, -20};
  const auto m = synthesize_measurements(array, src, NoiseModel::known(0.0), 7);
  for (std::size_t i = 0; i < array.size(); ++i) EXPECT_EQ(m.azimuth[i], true_bearing_2d(array[i], src));
  EXPECT_FALSE(m.has_elevation());
}

TEST(Synthesize, SameSeedSameData) {
  const auto array = ring(100);
  const auto a = synthesize_measurements(array, {10, 10}, NoiseModel::known(0.3), 42);
  const auto b = synthesize_measurements(array, {10, 10}, NoiseModel::known(0.3), 42);
  const auto c = synthesize_measurements(array, {10, 10}, NoiseModel::known(0.3), 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Synthesize, PrefixStableWhenArrayGrows) {
  const auto small = ring(10);
  std::vector<Point2> more(small.begin(), small.end());
  more.push_back({5, 300});
  more.push_back({-7, 250});
  const auto a = synthesize_measurements(small, {0, 1}, NoiseModel::known(0.2), 9);
  const auto b = synthesize_measurements(SensorArray2d(more), {0, 1}, NoiseModel::known(0.2), 9);
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(a.azimuth[i], b.azimuth[i]);
}

TEST(Synthesize, NoiseVarianceMatchesSigma) {
  const auto array = ring(100000);
  const Point2 src = {1, 2};
  const auto m = synthesize_measurements(array, src, NoiseModel::known(0.2), 1234);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < array.size(); ++i) {
    const double e = m.azimuth[i] - true_bearing_2d(array[i], src);
    s += e;
    s2 += e * e;
  }
  const double n = static_cast<double>(array.size());
  const double var = s2 / n - (s / n) * (s / n);
  EXPECT_NEAR(var, 0.04, 0.02 * 0.04);
}

TEST(Synthesize, ThreeDimensionalDrawsIndependentChannels) {
  std::vector<Point3> s;
  for (int i = 0; i < 20000; ++i) s.push_back({100 * std::cos(i * 0.01), 100 * std::sin(i * 0.01), 10.0 * (i % 7)});
  const SensorArray3d array(s);
  const Point3 src = {0, 0, 3};
  const auto m = synthesize_measurements(array, src, NoiseModel::known(0.1, 0.2), 5);
  double saa = 0, see = 0, sae = 0;
  for (std::size_t i = 0; i < array.size(); ++i) {
    const double ea = wrap_angle(m.azimuth[i] - true_bearing_2d({s[i][0], s[i][1]}, {0, 0}));
    const double ee = m.elevation[i] - true_elevation_3d(s[i], src);
    saa += ea * ea;
    see += ee * ee;
    sae += ea * ee;
  }
  const double n = static_cast<double>(array.size());
  EXPECT_NEAR(saa / n, 0.01, 0.05 * 0.01);
  EXPECT_NEAR(see / n, 0.04, 0.05 * 0.04);
  EXPECT_NEAR(sae / n / std::sqrt(saa / n * see / n), 0.0, 5.0 / std::sqrt(n));
}

TEST(Synthesize, RequiresKnownNoise) {
  EXPECT_AOA_ERROR(synthesize_measurements(ring(5), {0, 0}, NoiseModel::unknown(), 1), ErrorKind::kUsage);
}

TEST(Synthesize, SourceOnSensorIsDegenerate) {
  EXPECT_AOA_ERROR(synthesize_measurements(ring(5), {100, 0}, NoiseModel::known(0.1), 1),
                   ErrorKind::kDegenerateGeometry);
}

TEST(Moments, ZeroSigma) {
  EXPECT_EQ(var_sin(0.0), 0.0);
  EXPECT_EQ(mean_cos(0.0), 1.0);
  EXPECT_EQ(var_cos(0.0), 0.0);
}

TEST(Moments, VarSinAtPointTwo) {
  EXPECT_NEAR(var_sin(0.2), (1.0 - std::exp(-0.08)) / 2.0, 1e-16);
  EXPECT_NEAR(var_sin(0.2), 0.0384418, 1e-7);
}

TEST(Moments, ClosedFormIdentity) {
  for (double s = 0.0; s <= 3.0; s += 0.01) {
    EXPECT_NEAR(var_cos(s) + var_sin(s) + mean_cos(s) * mean_cos(s), 1.0, 1e-14) << s;
  }
}

TEST(Moments, VarCosMatchesExpandedForm) {
  for (double s = 0.0; s <= 2.0; s += 0.05) {
    EXPECT_NEAR(var_cos(s), (std::exp(-2 * s * s) + 1 - 2 * std::exp(-s * s)) / 2.0, 1e-15);
  }
}

// Sample moments of sin/cos of N(0, s^2) within 5 standard errors.
TEST(Moments, MatchMonteCarlo) {
  std::mt19937_64 gen(77);
  const int draws = 1000000;
  for (double sigma : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    std::normal_distribution<double> nd(0.0, sigma);
    double sc = 0, sc2 = 0, ss = 0, ss2 = 0, sc4 = 0, ss4 = 0;
    for (int i = 0; i < draws; ++i) {
      const double x = nd(gen);
      const double c = std::cos(x), s = std::sin(x);
      sc += c;
      sc2 += c * c;
      ss += s;
      ss2 += s * s;
      sc4 += c * c * c * c;
      ss4 += s * s * s * s;
    }
    const double n = draws;
    const double mc = sc / n;
    const double vc = sc2 / n - mc * mc;
    const double vs = ss2 / n - (ss / n) * (ss / n);
    EXPECT_NEAR(mc, mean_cos(sigma), 5.0 * std::sqrt(vc / n)) << sigma;
    // Standard error of a sample variance ~ sqrt((m4 - var^2) / n).
    const double se_vs = std::sqrt((ss4 / n - vs * vs) / n);
    EXPECT_NEAR(vs, var_sin(sigma), 5.0 * se_vs) << sigma;
    const double m4c = sc4 / n;  // crude bound for the fourth central moment of cos
    const double se_vc = std::sqrt(std::max(m4c - std::pow(sc2 / n, 2), vc * vc) / n);
    EXPECT_NEAR(vc, var_cos(sigma), 5.0 * se_vc) << sigma;
    if (sigma == 0.1 || sigma == 0.3) {
      EXPECT_NEAR(vs / var_sin(sigma), 1.0, 5e-3) << sigma;
    }
  }
}

TEST(SigmaFromVarSin, HandValues) {
  EXPECT_EQ(sigma_from_var_sin(0.0), 0.0);
  EXPECT_NEAR(sigma_from_var_sin(var_sin(0.2)), 0.2, 1e-12);
  EXPECT_NEAR(sigma_from_var_sin(0.4), std::sqrt(-std::log(0.2) / 2.0), 1e-14);
  EXPECT_NEAR(sigma_from_var_sin(0.4), 0.897061, 1e-6);
}

TEST(SigmaFromVarSin, RoundTrip) {
  for (double s = 1e-4; s < 2.5; s *= 1.3) {
    EXPECT_NEAR(sigma_from_var_sin(var_sin(s)), s, 1e-12 * s + 1e-15) << s;
  }
}

TEST(SigmaFromVarSin, OutOfRange) {
  EXPECT_AOA_ERROR(sigma_from_var_sin(0.5), ErrorKind::kOutOfRange);
  EXPECT_AOA_ERROR(sigma_from_var_sin(-1e-9), ErrorKind::kOutOfRange);
}

TEST(Rng, Mix64MatchesSplitMix64Reference) {
  // First output of the reference SplitMix64 generator seeded with 0.
  EXPECT_EQ(rng::mix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, RunSeedFollowsDocumentedFormula) {
  using rng::combine;
  EXPECT_EQ(rng::derive_run_seed(5, 1000, 17), combine(combine(combine(0x616f61, 5), 1000), 17));
  EXPECT_NE(rng::derive_run_seed(5, 1000, 17), rng::derive_run_seed(5, 1000, 18));
  EXPECT_NE(rng::derive_run_seed(5, 1000, 17), rng::derive_run_seed(5, 1001, 17));
}

TEST(Rng, NormalPairsAreStandardAndUncorrelated) {
  const int n = 1000000;
  double s1 = 0, s2 = 0, q1 = 0, q2 = 0, c = 0;
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = rng::normal_pair(99, rng::Stream::kAngleNoise, i);
    s1 += a;
    s2 += b;
    q1 += a * a;
    q2 += b * b;
    c += a * b;
  }
  const double se = 1.0 / std::sqrt(n);
  EXPECT_NEAR(s1 / n, 0.0, 5 * se);
  EXPECT_NEAR(s2 / n, 0.0, 5 * se);
  EXPECT_NEAR(q1 / n, 1.0, 5 * std::sqrt(2.0) * se);
  EXPECT_NEAR(q2 / n, 1.0, 5 * std::sqrt(2.0) * se);
  EXPECT_NEAR(c / n, 0.0, 5 * se);
}

TEST(Rng, UniformsInHalfOpenUnitInterval) {
  for (int i = 0; i < 100000; ++i) {
    const auto [a, b] = rng::uniform_pair(3, rng::Stream::kSensorLayout, i);
    EXPECT_GE(a, 0.0);
    EXPECT_LT(a, 1.0);
    EXPECT_GE(b, 0.0);
    EXPECT_LT(b, 1.0);
  }
}

}  // namespace
}  // namespace aoa
