#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gmmpf/io.hpp"
#include "gmmpf/measurement_model.hpp"

using namespace gmmpf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("gmmpf_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

ScenarioRecord small_scenario(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.duration = 20.0;
  cfg.rng_seed = seed;
  return simulate_scenario(cfg);
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2e7 + 1e-7, -123456.789, 1e-300}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

using Scenario = TempDir;

TEST_F(Scenario, RoundTripByteIdentical) {
  write_scenario(small_scenario(4), dir / "a");
  const auto loaded = load_scenario(dir / "a");
  write_scenario(loaded, dir / "b");
  for (const char* f : {"epochs.csv", "truth.csv", "faults.csv", "odometry.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_EQ(loaded.epochs.size(), 20u);
}

TEST_F(Scenario, IntegrityScenarioHasNoOdometry) {
  IntegrityScenarioConfig cfg;
  cfg.base.duration = 20.0;
  write_scenario(simulate_integrity_scenario(cfg), dir / "s");
  EXPECT_FALSE(fs::exists(dir / "s" / "odometry.csv"));
  EXPECT_FALSE(load_scenario(dir / "s").has_odometry);
}

TEST_F(Scenario, MalformedRowNamesLine) {
  write_scenario(small_scenario(5), dir / "s");
  const auto path = dir / "s" / "epochs.csv";
  std::istringstream in(slurp(path));
  std::string line, out;
  for (int n = 1; std::getline(in, line); ++n) out += (n == 4 ? std::string("1,2,oops") : line) + "\n";
  spit(path, out);
  try {
    load_scenario(dir / "s");
    FAIL() << "expected CsvError";
  } catch (const CsvError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
  }
}

TEST_F(Scenario, WrongHeader) {
  write_scenario(small_scenario(5), dir / "s");
  spit(dir / "s" / "truth.csv", "t,x,y\n0,0,0\n");
  EXPECT_THROW(load_scenario(dir / "s"), CsvError);
}

using Replay = TempDir;

namespace {
void write_replay_fixture(const fs::path& dir) {
  std::string epochs = std::string(kEpochsHeader) + "\n";
  for (int t = 1; t <= 3; ++t) {
    epochs += std::to_string(t) + ",3,0,0,20000000,0,0,0,20000012.5,5\n";
    epochs += std::to_string(t) + ",7,15000000,0,20000000,0,0,0,25000003,5\n";
  }
  spit(dir / "epochs.csv", epochs);
  spit(dir / "odometry.csv",
       std::string(kOdometryHeader) + "\n0.5,1.0,0.0\n1.0,3.0,0.1\n1.5,2.0,0.0\n2.0,2.0,0.0\n3.0,2.0,\n");
  spit(dir / "truth.csv", std::string(kTruthHeader) + "\n0,0,0,0\n4,8,0,0\n");
}
}  // namespace

TEST_F(Replay, ParsesFixture) {
  write_replay_fixture(dir);
  const auto s = load_replay_csv({dir / "epochs.csv", dir / "odometry.csv", dir / "truth.csv"});
  ASSERT_EQ(s.epochs.size(), 3u);
  ASSERT_EQ(s.truth.size(), 4u);
  EXPECT_EQ(s.epochs[0].size(), 2u);
  EXPECT_NEAR(s.epochs[0].odometry->speed, 2.0, 1e-12);
  EXPECT_NEAR(*s.epochs[0].odometry->yaw_rate, 0.05, 1e-12);
  EXPECT_NEAR(s.epochs[1].odometry->speed, 2.0, 1e-12);
  EXPECT_NEAR(s.truth[2].state.px, 4.0, 1e-12);
  EXPECT_NEAR(s.truth[0].state.px, 2.0, 1e-12);
}

TEST_F(Replay, InitialResidualRemoval) {
  write_replay_fixture(dir);
  const auto s = load_replay_csv({dir / "epochs.csv", dir / "odometry.csv", dir / "truth.csv"}, {true});
  StateVector at;
  at.px = 2.0;
  for (const auto& m : s.epochs[0].pseudoranges) {
    EXPECT_NEAR(m.rho - expected_pseudorange(at, m.satellite), 0.0, 1e-6);
  }
}

TEST_F(Replay, NonMonotoneAndMalformed) {
  write_replay_fixture(dir);
  spit(dir / "odometry.csv", std::string(kOdometryHeader) + "\n1.0,1,0\n0.5,1,0\n");
  try {
    load_replay_csv({dir / "epochs.csv", dir / "odometry.csv", std::nullopt});
    FAIL() << "expected CsvError";
  } catch (const CsvError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  spit(dir / "odometry.csv", std::string(kOdometryHeader) + "\n1.0,fast,0\n");
  EXPECT_THROW(load_replay_csv({dir / "epochs.csv", dir / "odometry.csv", std::nullopt}), CsvError);
}

using Results = TempDir;

TEST_F(Results, RoundTrip) {
  RunRecord r;
  for (int i = 0; i < 5; ++i) {
    EpochRecord e;
    e.time = i + 1;
    e.estimate = {i * 0.1, -1.0 / 3.0};
    e.truth = {0.0, 0.0};
    e.p_mir = 0.01 * i;
    e.r_a = 2.5;
    e.available = i % 2 == 0;
    e.hazard = i == 3;
    r.epochs.push_back(e);
  }
  write_results(r, dir / "results.csv");
  const auto back = load_results(dir / "results.csv", 15.0);
  ASSERT_EQ(back.epochs.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& a = r.epochs[i];
    const auto& b = back.epochs[i];
    EXPECT_EQ(a.time, b.time);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.p_mir, b.p_mir);
    EXPECT_EQ(a.r_a, b.r_a);
    EXPECT_EQ(a.available, b.available);
    EXPECT_EQ(a.hazard, b.hazard);
    EXPECT_NEAR(a.error(), b.error(), 1e-15);
  }
  spit(dir / "bad.csv", "t,est_px\n1,2\n");
  EXPECT_THROW(load_results(dir / "bad.csv", 15.0), CsvError);
}

using Config = TempDir;

TEST_F(Config, ParsesSections) {
  spit(dir / "c.ini",
       "[scenario]\nnum_satellites = 10\nmax_faults = 6\n"
       "[filter]\nnum_particles = 250\nem_iterations = 3\n"
       "[integrity]\nalarm_limit = 10\n"
       "[experiment]\nseeds = 0..4\nfilters = proposed,j-pf\noutput_dir = res\n");
  const auto c = load_experiment_config(dir / "c.ini");
  EXPECT_EQ(c.scenario.num_satellites, 10);
  EXPECT_EQ(c.scenario.max_faults, 6);
  EXPECT_EQ(c.proposed.num_particles, 250u);
  EXPECT_EQ(c.proposed.em_iterations, 3);
  EXPECT_EQ(c.integrity.alarm_limit, 10.0);
  EXPECT_EQ(c.seeds.size(), 5u);
  ASSERT_EQ(c.filters.size(), 2u);
  EXPECT_EQ(c.filters[1], FilterKind::kJpf);
  EXPECT_EQ(c.output_dir, "res");
}

TEST_F(Config, Errors) {
  EXPECT_THROW(load_experiment_config(dir / "missing.ini"), ConfigError);
  spit(dir / "a.ini", "[filter]\nparticles = 5\n");
  EXPECT_THROW(load_experiment_config(dir / "a.ini"), ConfigError);
  spit(dir / "b.ini", "[nope]\nx = 1\n");
  EXPECT_THROW(load_experiment_config(dir / "b.ini"), ConfigError);
  spit(dir / "c.ini", "[filter]\nnum_particles = many\n");
  EXPECT_THROW(load_experiment_config(dir / "c.ini"), ConfigError);
  spit(dir / "d.ini", "[experiment]\nfilters = ekf\n");
  EXPECT_THROW(load_experiment_config(dir / "d.ini"), ConfigError);
  spit(dir / "e.ini", "[filter]\nnum_particles = 0\n");
  EXPECT_THROW(load_experiment_config(dir / "e.ini"), ConfigError);
}

TEST_F(Config, EnvironmentOverrides) {
  ExperimentConfig c;
  setenv("GMMPF_SEED", "17", 1);
  setenv("GMMPF_OUTPUT_DIR", "elsewhere", 1);
  apply_environment_overrides(c);
  unsetenv("GMMPF_SEED");
  unsetenv("GMMPF_OUTPUT_DIR");
  EXPECT_EQ(c.seeds, std::vector<std::uint64_t>{17});
  EXPECT_EQ(c.output_dir, "elsewhere");
}
