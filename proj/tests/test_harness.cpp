#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "aoa/estimator2d.hpp"
#include "aoa/estimator3d.hpp"
#include "aoa/harness.hpp"
#include "aoa/rng.hpp"
#include "support/expect.hpp"
#include "support/oracles.hpp"

namespace aoa::mc {
namespace {

std::vector<Coords> sites2() {
  std::vector<Coords> out;
  for (const auto& p : oracle::sites_2d()) out.push_back({p[0], p[1]});
  return out;
}

std::vector<Coords> sites3() {
  std::vector<Coords> out;
  for (const auto& p : oracle::sites_3d()) out.push_back({p[0], p[1], p[2]});
  return out;
}

Scenario scenario_2d(std::size_t runs = 50) {
  Scenario s;
  s.name = "unit-2d";
  s.dim = 2;
  s.array = Replicated{sites2()};
  s.source = {60, 10};
  s.noise = NoiseModel::known(0.2);
  s.n_list = {100, 300, 1000};
  s.estimators = {EstimatorKind::kPls, EstimatorKind::kBels, EstimatorKind::kBelsGn,
                  EstimatorKind::kBelsVhat, EstimatorKind::kBelsVhatGn, EstimatorKind::kVhatA};
  s.runs = runs;
  s.base_seed = 17;
  return s;
}

Scenario scenario_3d(std::size_t runs = 20) {
  Scenario s;
  s.name = "unit-3d";
  s.dim = 3;
  s.array = Replicated{sites3()};
  s.source = {60, 10, 10};
  s.noise = NoiseModel::known(0.2, 0.2);
  s.n_list = {100, 300};
  s.estimators = {all_estimators().begin(), all_estimators().end()};
  s.runs = runs;
  s.base_seed = 23;
  return s;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

TEST(Metrics, HandExamples) {
  const std::vector<Coords> exact = {{1, 2}, {1, 2}};
  auto m = metrics(exact, std::vector<double>{1, 2});
  EXPECT_EQ(m.bias, 0.0);
  EXPECT_EQ(m.rmse, 0.0);

  const std::vector<Coords> sym = {{1, 3}, {1, 1}};
  m = metrics(sym, std::vector<double>{1, 2});
  EXPECT_DOUBLE_EQ(m.bias, 0.0);
  EXPECT_DOUBLE_EQ(m.rmse, 1.0);

  const std::vector<Coords> off = {{3, 0}, {-1, 0}, {1, 10}};
  // Errors (2,-2), (-2,-2), (0,8): mean (0, 4/3), squared norms 8, 8, 64.
  m = metrics(off, std::vector<double>{1, 2});
  EXPECT_NEAR(m.bias, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.rmse, std::sqrt(80.0 / 3.0), 1e-14);
}

TEST(Metrics, RejectsEmptyOrMismatched) {
  EXPECT_AOA_ERROR(metrics(std::vector<Coords>{}, std::vector<double>{1, 2}), ErrorKind::kUsage);
  EXPECT_AOA_ERROR(metrics(std::vector<Coords>{{1, 2, 3}}, std::vector<double>{1, 2}), ErrorKind::kUsage);
}

McSummary synthetic_summary(const std::vector<std::pair<std::size_t, double>>& points) {
  McSummary s;
  for (const auto& [n, rmse] : points) {
    CellSummary c;
    c.n = n;
    c.estimator = EstimatorKind::kBelsGn;
    c.rmse = rmse;
    c.runs_completed = 10;
    s.cells.push_back(c);
  }
  return s;
}

TEST(SlopeCheck, ExactPowerLaws) {
  EXPECT_NEAR(slope_check(synthetic_summary({{100, 0.1}, {400, 0.05}, {1600, 0.025}}), EstimatorKind::kBelsGn),
              -0.5, 1e-12);
  EXPECT_NEAR(slope_check(synthetic_summary({{100, 2}, {300, 2}, {1000, 2}}), EstimatorKind::kBelsGn), 0.0,
              1e-12);
}

TEST(SlopeCheck, NeedsThreePositivePoints) {
  EXPECT_AOA_ERROR(slope_check(synthetic_summary({{100, 0.1}, {400, 0.05}}), EstimatorKind::kBelsGn),
                   ErrorKind::kUsage);
  EXPECT_AOA_ERROR(slope_check(synthetic_summary({{100, 0.1}, {400, 0.05}, {900, 0.0}}), EstimatorKind::kBelsGn),
                   ErrorKind::kUsage);
}

TEST(Scenario, ValidationRejectsBadFields) {
  auto expect_invalid = [](Scenario s) { EXPECT_AOA_ERROR(s.validate(), ErrorKind::kUsage); };
  EXPECT_NO_THROW(scenario_2d().validate());
  EXPECT_NO_THROW(scenario_3d().validate());
  auto s = scenario_2d();
  s.n_list = {300, 100};
  expect_invalid(s);
  s = scenario_2d();
  s.runs = 0;
  expect_invalid(s);
  s = scenario_2d();
  s.n_list = {105};
  expect_invalid(s);
  s = scenario_2d();
  s.estimators.push_back(EstimatorKind::kBelsZ);
  expect_invalid(s);
  s = scenario_2d();
  s.estimators.push_back(EstimatorKind::kPls);
  expect_invalid(s);
  s = scenario_2d();
  s.noise = NoiseModel::known(0.2, 0.1);
  expect_invalid(s);
  s = scenario_2d();
  s.array = FixedArray{sites2()};
  expect_invalid(s);
  s.n_list = {10};
  EXPECT_NO_THROW(s.validate());
  s = scenario_3d();
  s.noise = NoiseModel::known(0.2);
  expect_invalid(s);
  s = scenario_2d();
  s.array = RandomCircle{-1.0, {0, 0}};
  expect_invalid(s);
}

TEST(Campaign, ZeroNoiseGivesZeroError) {
  auto s = scenario_2d(3);
  s.noise = NoiseModel::known(0.0);
  s.estimators = {EstimatorKind::kPls, EstimatorKind::kBels, EstimatorKind::kBelsGn};
  const auto summary = run_campaign(s);
  ASSERT_EQ(summary.cells.size(), 9u);
  for (const auto& c : summary.cells) {
    EXPECT_LT(c.rmse, 1e-9) << to_string(c.estimator) << " n=" << c.n;
    EXPECT_EQ(c.runs_failed, 0u);
  }
}

TEST(Campaign, IndependentOfParallelism) {
  const auto s = scenario_2d(40);
  CampaignOptions one, eight;
  eight.parallelism = 8;
  const auto a = run_campaign(s, one);
  const auto b = run_campaign(s, eight);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_TRUE(same_bits(a.cells[i].rmse, b.cells[i].rmse));
    EXPECT_TRUE(same_bits(a.cells[i].bias, b.cells[i].bias));
    EXPECT_EQ(a.cells[i].first_seed, b.cells[i].first_seed);
  }
}

TEST(Campaign, CellSeedsFollowRunSeedFormula) {
  const auto s = scenario_2d(5);
  const auto summary = run_campaign(s);
  const auto* c = summary.find(300, EstimatorKind::kBels);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->base_seed, 17u);
  EXPECT_EQ(c->first_seed, rng::derive_run_seed(17, 300, 0));
  EXPECT_EQ(c->last_seed, rng::derive_run_seed(17, 300, 4));
  EXPECT_EQ(c->runs_completed, 5u);
  EXPECT_TRUE(std::isfinite(c->rcrlb));
  EXPECT_TRUE(std::isnan(summary.find(300, EstimatorKind::kVhatA)->rcrlb));
}

TEST(Campaign, ReplicatedMatchesExpandedFixedArray) {
  auto rep = scenario_2d(5);
  rep.n_list = {100};
  std::vector<Coords> expanded;
  for (int t = 0; t < 10; ++t)
    for (const auto& p : sites2()) expanded.push_back(p);
  auto fixed = rep;
  fixed.array = FixedArray{expanded};
  CampaignOptions keep;
  keep.keep_runs = true;
  const auto a = run_campaign(rep, keep);
  const auto b = run_campaign(fixed, keep);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) EXPECT_EQ(a.runs[i].estimate, b.runs[i].estimate);
  EXPECT_NEAR(a.cells[0].rcrlb, b.cells[0].rcrlb, 1e-12 * b.cells[0].rcrlb);
}

TEST(Campaign, RmseBoundsMeanError) {
  CampaignOptions keep;
  keep.keep_runs = true;
  const auto s = scenario_2d(30);
  const auto summary = run_campaign(s, keep);
  for (const auto& c : summary.cells) {
    if (c.estimator == EstimatorKind::kVhatA) continue;
    double mx = 0, my = 0, count = 0;
    for (const auto& r : summary.runs) {
      if (r.n != c.n || r.estimator != c.estimator || !r.estimate) continue;
      mx += (*r.estimate)[0] - 60;
      my += (*r.estimate)[1] - 10;
      ++count;
    }
    mx /= count;
    my /= count;
    EXPECT_GE(c.rmse * c.rmse, (mx * mx + my * my) * (1 - 1e-12));
    EXPECT_NEAR(c.bias, std::abs(mx) + std::abs(my), 1e-9);
  }
}

TEST(Campaign, RandomCircleRedrawsSensorsPerRun) {
  Scenario s = scenario_2d(3);
  s.array = RandomCircle{100.0, {5, -5}};
  s.source = {150, 0};
  s.n_list = {10};
  const auto a = realize_sensors(s, 10, rng::derive_run_seed(17, 10, 0));
  const auto b = realize_sensors(s, 10, rng::derive_run_seed(17, 10, 1));
  EXPECT_EQ(a, realize_sensors(s, 10, rng::derive_run_seed(17, 10, 0)));
  EXPECT_NE(a, b);
  for (const auto& p : a) EXPECT_NEAR(std::hypot(p[0] - 5, p[1] + 5), 100.0, 1e-12);
  const auto summary = run_campaign(s);
  for (const auto& c : summary.cells) EXPECT_EQ(c.runs_completed + c.runs_failed, 3u);
}

TEST(Campaign, FailuresAreCountedNotFatal) {
  Scenario s;
  s.name = "noisy";
  s.dim = 2;
  s.array = FixedArray{{{0, 0}, {10, 0}, {20, 0}, {30, 1}}};
  s.source = {-200, 0};
  s.noise = NoiseModel::known(0.0);
  s.n_list = {4};
  s.estimators = {EstimatorKind::kPls};
  s.runs = 3;
  const auto summary = run_campaign(s);
  EXPECT_EQ(summary.cells[0].runs_completed + summary.cells[0].runs_failed, 3u);
  s.array = FixedArray{{{0, 0}, {10, 0}, {20, 0}, {30, 0}}};
  const auto failed = run_campaign(s);
  EXPECT_EQ(failed.cells[0].runs_failed, 3u);
  EXPECT_FALSE(failed.cells[0].valid());
}

TEST(Evaluate, VhatPipelineMatchesTwoStep2d) {
  const auto s = scenario_2d();
  const auto sensors = realize_sensors(s, 300, 5);
  const auto meas = synthesize_run(s, sensors, 5);
  const std::vector<EstimatorKind> kinds = {EstimatorKind::kBelsVhatGn, EstimatorKind::kBelsGn};
  const auto est = evaluate_estimators(s, sensors, meas, kinds);
  const auto array = oracle::replicate(oracle::sites_2d(), 30);
  const auto unknown = two_step_2d(array, meas, NoiseModel::unknown()).position;
  const auto known = two_step_2d(array, meas, NoiseModel::known(0.2)).position;
  EXPECT_EQ(*est[0], (Coords{unknown[0], unknown[1]}));
  EXPECT_EQ(*est[1], (Coords{known[0], known[1]}));
}

TEST(Evaluate, VhatPipelineMatchesTwoStep3d) {
  const auto s = scenario_3d();
  const auto sensors = realize_sensors(s, 300, 6);
  const auto meas = synthesize_run(s, sensors, 6);
  const std::vector<EstimatorKind> kinds = {EstimatorKind::kBelsVhatGn, EstimatorKind::kBelsGn,
                                            EstimatorKind::kBelsZ};
  const auto est = evaluate_estimators(s, sensors, meas, kinds);
  const auto array = oracle::replicate(oracle::sites_3d(), 30);
  const auto unknown = two_step_3d(array, meas, NoiseModel::unknown()).position;
  const auto known = two_step_3d(array, meas, NoiseModel::known(0.2, 0.2)).position;
  const auto b = bels_3d(array, meas, var_sin(0.2), var_sin(0.2)).position;
  EXPECT_EQ(*est[0], (Coords{unknown[0], unknown[1], unknown[2]}));
  EXPECT_EQ(*est[1], (Coords{known[0], known[1], known[2]}));
  EXPECT_EQ(*est[2], (Coords{b[2]}));
}

TEST(Campaign, ThreeDimensionalCellsComplete) {
  const auto summary = run_campaign(scenario_3d(10));
  EXPECT_EQ(summary.cells.size(), 2u * all_estimators().size());
  for (const auto& c : summary.cells) {
    EXPECT_EQ(c.runs_failed, 0u) << to_string(c.estimator);
    EXPECT_TRUE(std::isfinite(c.rmse));
  }
  const auto* z = summary.find(300, EstimatorKind::kBelsZ);
  const auto* full = summary.find(300, EstimatorKind::kBels);
  EXPECT_LT(z->rcrlb, full->rcrlb);
}

TEST(EstimatorNames, RoundTrip) {
  for (auto k : all_estimators()) EXPECT_EQ(parse_estimator(to_string(k)), k);
  EXPECT_FALSE(parse_estimator("nope").has_value());
  EXPECT_EQ(to_string(EstimatorKind::kBelsVhatGn), "BELS(vhat)+GN");
}

TEST(Bench, ProducesRowPerCell) {
  auto s = scenario_2d(1);
  s.n_list = {100, 1000};
  s.estimators = {EstimatorKind::kBelsGn};
  const auto rows = run_bench(s, 3);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].ratio_to_first, 1.0);
  EXPECT_GT(rows[1].median_seconds, 0.0);
}

}  // namespace
}  // namespace aoa::mc
