#include <array>
#include <cmath>
#include <random>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "gmmpf/experiment.hpp"
#include "gmmpf/metrics.hpp"

using namespace gmmpf;

namespace {
using V = std::vector<Eigen::Vector2d>;

RunRecord record_from(const std::vector<double>& pmir, const std::vector<double>& ra,
                      const std::vector<bool>& hazard) {
  RunRecord r;
  for (std::size_t i = 0; i < pmir.size(); ++i) {
    EpochRecord e;
    e.time = static_cast<double>(i);
    e.p_mir = pmir[i];
    e.r_a = ra[i];
    e.hazard = hazard[i];
    e.truth = {0, 0};
    e.estimate = {hazard[i] ? 20.0 : 1.0, 0};
    r.epochs.push_back(e);
  }
  return r;
}
}  // namespace

TEST(Rmse, Examples) {
  const V t{{0, 0}, {1, 1}};
  EXPECT_EQ(rmse(t, t), 0.0);
  EXPECT_NEAR(rmse(V{{3, 0}, {1, 4}}, t), 3.0, 1e-12);
  EXPECT_NEAR(rmse(V{{3, 0}, {0, 4}}, V{{0, 0}, {0, 0}}), std::sqrt(12.5), 1e-12);
  EXPECT_THROW(rmse(V{{0, 0}}, t), InvariantError);
  EXPECT_THROW(rmse(V{}, V{}), InvariantError);
}

TEST(PctOver, Examples) {
  const V z{{0, 0}, {0, 0}, {0, 0}, {0, 0}};
  EXPECT_EQ(pct_over(z, z), 0.0);
  EXPECT_EQ(pct_over(V{{20, 0}, {0, 20}, {-20, 0}, {0, -20}}, z), 100.0);
  EXPECT_EQ(pct_over(V{{20, 0}, {1, 0}, {2, 0}, {3, 0}}, z), 25.0);
}

TEST(PfaPir, Examples) {
  using B = std::array<bool, 4>;
  const B never{}, always{true, true, true, true};
  auto r = pfa_pir(always, never);
  EXPECT_EQ(r.p_fa, 0.0);
  EXPECT_EQ(r.p_ir, 0.0);
  r = pfa_pir(never, never);
  EXPECT_EQ(r.p_fa, 1.0);
  r = pfa_pir(B{true, false, true, false}, B{true, true, false, false});
  EXPECT_EQ(r.p_fa, 0.25);
  EXPECT_EQ(r.p_ir, 0.25);
}

TEST(PfaPir, DecisionsPartitionEpochs) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.4);
  std::array<bool, 997> a{}, h{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = coin(rng);
    h[i] = coin(rng);
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < a.size(); ++i) correct += (a[i] != h[i]) ? 1 : 0;
  const auto r = pfa_pir(a, h);
  EXPECT_NEAR(r.p_fa + r.p_ir + static_cast<double>(correct) / 997.0, 1.0, 1e-12);
}

TEST(ThresholdSweep, ExtremesAndFrontier) {
  const auto run = record_from({0.0, 0.3, 0.8, 0.1, 0.6}, {1, 5, 20, 2, 8}, {false, false, true, false, true});
  const auto pmir = default_pmir_grid();
  const auto ra = default_ra_grid();
  ASSERT_EQ(pmir.size(), 101u);
  ASSERT_EQ(ra.size(), 31u);
  const auto pts = threshold_sweep({run}, pmir, ra);
  ASSERT_EQ(pts.size(), 101u * 31u);
  for (const auto& p : pts) {
    // Zero thresholds always alarm, the widest never do.
    if (p.pmir_threshold == 0.0 && p.ra_threshold == 0.0) EXPECT_EQ(p.p_ir, 0.0);
    if (p.pmir_threshold == 1.0 && p.ra_threshold == 30.0) EXPECT_EQ(p.p_fa, 0.0);
  }
  const auto front = pareto_frontier(pts);
  ASSERT_FALSE(front.empty());
  for (std::size_t i = 1; i < front.size(); ++i) {
    EXPECT_GE(front[i].p_fa, front[i - 1].p_fa);
    EXPECT_LT(front[i].p_ir, front[i - 1].p_ir);
  }
  for (const auto& p : pts) {
    const double best = frontier_ir_at(front, p.p_fa);
    EXPECT_LE(best, p.p_ir);
  }
  EXPECT_EQ(frontier_ir_at(front, -1.0), std::numeric_limits<double>::infinity());
}

TEST(FrontierDominance, Counting) {
  const std::vector<SweepPoint> ours{{0, 0, 0.0, 0.5}, {0, 0, 0.2, 0.1}};
  const std::vector<SweepPoint> theirs{{0, 0, 0.0, 0.6}, {0, 0, 0.1, 0.05}};
  const auto d = frontier_dominance(ours, theirs);
  // Levels 0.0, 0.1 and 0.2: ours 0.5/0.5/0.1 vs theirs 0.6/0.05/0.05.
  EXPECT_EQ(d.compared, 3u);
  EXPECT_EQ(d.not_worse, 1u);
}

TEST(MeanAndStandardError, Values) {
  const auto m = mean_and_standard_error(std::vector<double>{1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.standard_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
}

TEST(SeedList, Parsing) {
  EXPECT_EQ(parse_seed_list("0..3"), (std::vector<std::uint64_t>{0, 1, 2, 3}));
  EXPECT_EQ(parse_seed_list("1,5,9"), (std::vector<std::uint64_t>{1, 5, 9}));
  EXPECT_EQ(parse_seed_list("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_THROW(parse_seed_list("3..1"), InvariantError);
  EXPECT_THROW(parse_seed_list("x"), InvariantError);
  EXPECT_EQ(parse_filter_kind("kf-raim"), FilterKind::kKfRaim);
  EXPECT_THROW(parse_filter_kind("ekf"), InvariantError);
}

class ExperimentTest : public ::testing::Test {
 protected:
  ExperimentConfig small() const {
    ExperimentConfig c;
    c.scenario.duration = 40.0;
    c.proposed.num_particles = 100;
    c.jpf.num_particles = 100;
    c.seeds = {1, 2, 3};
    c.threads = 2;
    return c;
  }
};

TEST_F(ExperimentTest, DeterministicGivenSeeds) {
  const auto a = run_experiment(small()), b = run_experiment(small());
  ASSERT_EQ(a.rows.size(), 3u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].run_rmse, b.rows[i].run_rmse);
    EXPECT_EQ(a.rows[i].rmse.mean, b.rows[i].rmse.mean);
  }
}

TEST_F(ExperimentTest, RowsConsistentWithRecords) {
  const auto t = run_experiment(small());
  for (const auto& row : t.rows) {
    EXPECT_EQ(row.runs, 3u);
    EXPECT_EQ(row.failures, 0u);
    double mean = 0.0, ss = 0.0;
    std::size_t n = 0;
    for (std::size_t s = 0; s < row.records.size(); ++s) {
      EXPECT_DOUBLE_EQ(row.run_rmse[s], rmse(row.records[s]));
      mean += row.run_rmse[s] / 3.0;
      for (const auto& e : row.records[s].epochs) {
        ss += e.error() * e.error();
        ++n;
      }
    }
    EXPECT_NEAR(row.rmse.mean, mean, 1e-12);
    // Pooled RMSE equals the epoch-weighted quadratic mean of per-run RMSEs.
    double q = 0.0;
    for (std::size_t s = 0; s < row.records.size(); ++s) {
      q += row.run_rmse[s] * row.run_rmse[s] * static_cast<double>(row.records[s].epochs.size());
    }
    EXPECT_NEAR(std::sqrt(q / static_cast<double>(n)), std::sqrt(ss / static_cast<double>(n)), 1e-9);
  }
}

TEST_F(ExperimentTest, IntegritySweepShape) {
  ExperimentConfig c;
  c.scenario_kind = ScenarioKind::kIntegrity;
  c.integrity_scenario.base.duration = 40.0;
  c.integrity_scenario.fault_start = 10.0;
  c.integrity_scenario.fault_end = 20.0;
  c.seeds = {1};
  const auto pmir = default_pmir_grid();
  const auto ra = default_ra_grid();
  const auto s = integrity_sweep(c, {50, 100}, {10.0, 15.0}, pmir, ra);
  ASSERT_EQ(s.curves.size(), 8u);
  ASSERT_EQ(s.dominance.size(), 4u);
  for (std::size_t i = 0; i < s.curves.size(); ++i) {
    EXPECT_EQ(s.curves[i].monitor, i % 2 == 0 ? "proposed" : "bayesian-raim");
    for (std::size_t j = 1; j < s.curves[i].frontier.size(); ++j) {
      EXPECT_GE(s.curves[i].frontier[j].p_fa, s.curves[i].frontier[j - 1].p_fa);
    }
  }
  EXPECT_THROW(integrity_sweep(c, {50}, {10.0}, pmir, ra, FilterKind::kKfRaim), InvariantError);
}
