#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gmmpf/simulator.hpp"

using namespace gmmpf;

TEST(Trajectory, LengthAndStepSize) {
  ScenarioConfig cfg;
  Rng rng(1);
  const auto traj = generate_trajectory(cfg, rng);
  ASSERT_EQ(traj.size(), 401u);
  double length = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double step = (traj[i].state.position() - traj[i - 1].state.position()).norm();
    EXPECT_NEAR(step, 10.0, 1e-9);
    length += step;
  }
  EXPECT_NEAR(length, 4000.0, 1.0);
  Rng again(1);
  EXPECT_EQ(generate_trajectory(cfg, again).back().state.px, traj.back().state.px);
}

TEST(Trajectory, SquarePath) {
  ScenarioConfig cfg;
  cfg.shape = TrajectoryShape::kSquare;
  Rng rng(1);
  const auto traj = generate_trajectory(cfg, rng);
  for (const auto& s : traj) {
    const double x = s.state.px, y = s.state.py;
    const bool on_edge = std::abs(x) < 1e-6 || std::abs(y) < 1e-6 || std::abs(x - 1000.0) < 1e-6 ||
                         std::abs(y - 1000.0) < 1e-6;
    EXPECT_TRUE(on_edge) << x << "," << y;
  }
}

TEST(Constellation, HeightMotionSpacing) {
  ScenarioConfig cfg;
  Rng rng(2);
  Constellation c(cfg, rng);
  const auto s0 = c.at(0.0), s1 = c.at(400.0);
  ASSERT_EQ(s0.size(), 7u);
  for (std::size_t k = 0; k < s0.size(); ++k) {
    EXPECT_EQ(s0[k].position.z(), 2e7);
    EXPECT_EQ(s1[k].position.z(), 2e7);
    EXPECT_NEAR((s1[k].position - s0[k].position).norm(), 4e5, 1e-6);
    EXPECT_NEAR(s0[k].velocity.norm(), 1000.0, 1e-9);
  }
  auto az = c.azimuths();
  std::sort(az.begin(), az.end());
  const double min_gap = kTwoPi / (2.0 * 7);
  for (std::size_t k = 0; k < az.size(); ++k) {
    const double next = k + 1 < az.size() ? az[k + 1] : az[0] + kTwoPi;
    EXPECT_GE(next - az[k], min_gap - 1e-12);
  }
  EXPECT_GE(c.min_spacing(), min_gap - 1e-12);
}

TEST(FaultState, NoChangeIsIdentity) {
  ScenarioConfig cfg;
  cfg.fault_change_prob = 0.0;
  Rng rng(3);
  const auto fs = draw_fault_state(cfg, rng);
  for (int i = 0; i < 100; ++i) {
    const auto next = update_fault_state(fs, cfg, rng);
    EXPECT_EQ(next.faulty, fs.faulty);
    EXPECT_EQ(next.bias, fs.bias);
  }
}

TEST(FaultState, SizeDistributionUniform) {
  ScenarioConfig cfg;
  cfg.fault_change_prob = 1.0;
  cfg.bias_min = 20.0;
  cfg.bias_max = 80.0;
  Rng rng(4);
  FaultState fs = draw_fault_state(cfg, rng);
  std::vector<int> count(static_cast<std::size_t>(cfg.max_faults) + 1, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    fs = update_fault_state(fs, cfg, rng);
    ASSERT_LE(fs.faulty.size(), static_cast<std::size_t>(cfg.max_faults));
    ++count[fs.faulty.size()];
    for (int id : fs.faulty) {
      const double b = fs.bias[static_cast<std::size_t>(id)];
      ASSERT_GE(b, 20.0);
      ASSERT_LE(b, 80.0);
    }
  }
  const double expected = 1.0 / static_cast<double>(count.size());
  for (int c : count) EXPECT_NEAR(static_cast<double>(c) / draws, expected, 0.03 * expected);
}

TEST(SimulateEpoch, ResidualsAtTruth) {
  ScenarioConfig cfg;
  cfg.gnss_sigma = 1e-9;
  Rng rng(5);
  Constellation c(cfg, rng);
  TruthSample truth;
  truth.state.px = 100;
  truth.state.py = -50;
  truth.state.heading = 0.0;
  FaultState fs;
  fs.bias.assign(7, 0.0);
  fs.faulty = {2};
  fs.bias[2] = 100.0;
  const auto sats = c.at(10.0);
  const auto e = simulate_epoch(10.0, truth, sats, fs, cfg, rng);
  for (std::size_t k = 0; k < sats.size(); ++k) {
    const double range = (sats[k].position - Eigen::Vector3d(100, -50, 0)).norm();
    EXPECT_NEAR(e.pseudoranges[k].rho - range, k == 2 ? 100.0 : 0.0, 1e-6);
  }
  ASSERT_TRUE(e.odometry.has_value());
}

TEST(SimulateEpoch, CleanNoiseSigma) {
  ScenarioConfig cfg;
  Rng rng(6);
  Constellation c(cfg, rng);
  FaultState fs;
  fs.bias.assign(7, 0.0);
  TruthSample truth;
  truth.state.heading = 0.0;
  const auto sats = c.at(0.0);
  double ss = 0.0;
  std::size_t n = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto e = simulate_epoch(0.0, truth, sats, fs, cfg, rng);
    for (std::size_t k = 0; k < sats.size(); ++k) {
      const double r = e.pseudoranges[k].rho - sats[k].position.norm();
      ss += r * r;
      ++n;
    }
  }
  EXPECT_NEAR(std::sqrt(ss / static_cast<double>(n)), cfg.gnss_sigma, 0.02 * cfg.gnss_sigma);
}

TEST(SimulateScenario, ReproducibleAndAligned) {
  ScenarioConfig cfg;
  cfg.rng_seed = 11;
  const auto a = simulate_scenario(cfg), b = simulate_scenario(cfg);
  ASSERT_EQ(a.epochs.size(), 400u);
  ASSERT_EQ(a.truth.size(), 401u);
  for (std::size_t j = 0; j < a.epochs.size(); ++j) {
    EXPECT_EQ(a.epochs[j].time, a.truth[j + 1].time);
    for (std::size_t k = 0; k < a.epochs[j].size(); ++k) {
      ASSERT_EQ(a.epochs[j].pseudoranges[k].rho, b.epochs[j].pseudoranges[k].rho);
    }
  }
  cfg.rng_seed = 12;
  EXPECT_NE(simulate_scenario(cfg).epochs[0].pseudoranges[0].rho, a.epochs[0].pseudoranges[0].rho);
}

TEST(IntegrityScenario, FaultWindowAndOffsetGeometry) {
  IntegrityScenarioConfig cfg;
  cfg.base.rng_seed = 3;
  const auto rec = simulate_integrity_scenario(cfg);
  EXPECT_FALSE(rec.has_odometry);
  std::map<double, std::vector<FaultRecord>> by_time;
  for (const auto& f : rec.faults) by_time[f.time].push_back(f);
  ASSERT_FALSE(by_time.empty());
  for (const auto& [t, faults] : by_time) {
    EXPECT_GE(t, 125.0);
    EXPECT_LE(t, 175.0);
    EXPECT_LE(faults.size(), 6u);
    if (faults.size() < 3) continue;
    // Each bias is the range change from a single horizontal offset.
    const auto j = static_cast<std::size_t>(std::lround(t)) - 1;
    const auto& e = rec.epochs[j];
    const Eigen::Vector2d truth = rec.truth[j + 1].state.position();
    Eigen::MatrixXd h(faults.size(), 2);
    Eigen::VectorXd b(faults.size());
    for (std::size_t i = 0; i < faults.size(); ++i) {
      const auto it = std::find_if(e.pseudoranges.begin(), e.pseudoranges.end(),
                                   [&](const auto& m) { return m.sat_id == faults[i].sat_id; });
      ASSERT_NE(it, e.pseudoranges.end());
      const Eigen::Vector3d u = (Eigen::Vector3d(truth.x(), truth.y(), 0.0) - it->satellite.position).normalized();
      h.row(static_cast<Eigen::Index>(i)) << u.x(), u.y();
      b(static_cast<Eigen::Index>(i)) = faults[i].bias;
    }
    const Eigen::Vector2d offset = h.colPivHouseholderQr().solve(b);
    EXPECT_LT((h * offset - b).cwiseAbs().maxCoeff(), 1e-2);
    EXPECT_GE(offset.norm(), 50.0 - 1e-3);
    EXPECT_LE(offset.norm(), 150.0 + 1e-3);
  }
}
