#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "gmmpf/measurement_model.hpp"
#include "gmmpf/motion.hpp"
#include "gmmpf/types.hpp"

using namespace gmmpf;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

PseudorangeMeasurement meas(double rho, Eigen::Vector3d sat, double sigma) {
  PseudorangeMeasurement m;
  m.sat_id = 1;
  m.rho = rho;
  m.satellite.position = sat;
  m.sigma = sigma;
  return m;
}
}  // namespace

TEST(NormalizeLogWeights, Examples) {
  auto w = normalize_log_weights(std::vector<double>{0, 0, 0});
  for (double x : w) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);

  w = normalize_log_weights(std::vector<double>{-1000, -1000});
  EXPECT_DOUBLE_EQ(w[0], 0.5);
  EXPECT_DOUBLE_EQ(w[1], 0.5);

  w = normalize_log_weights(std::vector<double>{std::log(1.0), std::log(3.0)});
  EXPECT_NEAR(w[0], 0.25, 1e-15);
  EXPECT_NEAR(w[1], 0.75, 1e-15);
}

TEST(NormalizeLogWeights, PartialNegativeInfinity) {
  const auto w = normalize_log_weights(std::vector<double>{-kInf, 2.0, -kInf});
  EXPECT_EQ(w[0], 0.0);
  EXPECT_EQ(w[1], 1.0);
}

TEST(NormalizeLogWeights, AllNegativeInfinityIsDegenerate) {
  EXPECT_THROW(normalize_log_weights(std::vector<double>{-kInf, -kInf}), DegenerateWeightsError);
  EXPECT_THROW(normalize_log_weights(std::vector<double>{}), DegenerateWeightsError);
}

TEST(LogSumExp, LargeValues) {
  EXPECT_NEAR(log_sum_exp(std::vector<double>{1000.0, 1000.0}), 1000.0 + std::log(2.0), 1e-12);
  EXPECT_EQ(log_sum_exp(std::vector<double>{-kInf}), -kInf);
}

TEST(EffectiveSampleSize, Examples) {
  EXPECT_NEAR(effective_sample_size(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 4.0, 1e-12);
  EXPECT_NEAR(effective_sample_size(std::vector<double>{1, 0, 0}), 1.0, 1e-12);
  EXPECT_NEAR(effective_sample_size(std::vector<double>{0.5, 0.25, 0.25}), 1.0 / 0.375, 1e-12);
}

TEST(Types, Validation) {
  StateVector s;
  s.px = std::nan("");
  EXPECT_THROW(s.validate(), InvariantError);
  StateVector h;
  h.heading = 4.0;
  EXPECT_THROW(h.validate(), InvariantError);

  ParticleSet ps{{StateVector{}, StateVector{}}, {0.7, 0.7}};
  EXPECT_THROW(ps.validate(), InvariantError);
  EXPECT_THROW((ParticleSet{{}, {}}).validate(), InvariantError);

  EpochMeasurements e;
  EXPECT_THROW(e.validate(), InvariantError);
  e.pseudoranges.push_back(meas(1.0, {0, 0, 2e7}, -1.0));
  EXPECT_THROW(e.validate(), InvariantError);

  EXPECT_THROW((GmmCoefficients{{0.5, 0.6}}).validate(), InvariantError);
  EXPECT_NO_THROW(GmmCoefficients::uniform(4).validate());
}

TEST(WrapAngle, Range) {
  EXPECT_NEAR(wrap_angle(3 * kPi), -kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(-kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(2 * kPi + 0.1), 0.1, 1e-12);
}

TEST(ExpectedPseudorange, Examples) {
  SatelliteState sat;
  sat.position = {0, 0, 2e7};
  EXPECT_DOUBLE_EQ(expected_pseudorange(StateVector{}, sat), 2e7);
  sat.position = {3e6, 4e6, 0};
  EXPECT_NEAR(expected_pseudorange(StateVector{}, sat), 5e6, 1e-6);
  StateVector biased;
  biased.clock_bias = 10.0;
  sat.position = {0, 0, 2e7};
  EXPECT_DOUBLE_EQ(expected_pseudorange(biased, sat), 2e7 + 10.0);
}

TEST(ExpectedPseudorange, ZeroRangeIsGeometryError) {
  SatelliteState sat;
  EXPECT_THROW(expected_pseudorange(StateVector{}, sat), GeometryError);
}

TEST(NormalizedResidual, Examples) {
  // Satellite 90 m straight up.
  EXPECT_DOUBLE_EQ(normalized_residual(StateVector{}, meas(100.0, {0, 0, 90}, 5.0)), 2.0);
  EXPECT_DOUBLE_EQ(normalized_residual(StateVector{}, meas(90.0, {0, 0, 90}, 5.0)), 0.0);
  EXPECT_DOUBLE_EQ(normalized_residual(StateVector{}, meas(2e7 - 7.5, {0, 0, 2e7}, 5.0)), -1.5);
}

TEST(Chi2Density, Examples) {
  const double c = 1.0 / std::sqrt(kTwoPi);
  EXPECT_NEAR(chi2_1_density(1.0), c * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(chi2_1_density(1.0), 0.24197, 1e-5);
  EXPECT_NEAR(chi2_1_density(4.0), 0.5 * c * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(chi2_1_density(4.0), 0.02700, 1e-5);
  const double clamp = c / std::sqrt(kVoteClamp) * std::exp(-kVoteClamp / 2);
  EXPECT_NEAR(chi2_1_density(0.0), clamp, 1e-12);
  EXPECT_NEAR(chi2_1_density(0.0), 12.615, 1e-2);
}

TEST(Chi2Density, NegativeIsDomainError) {
  EXPECT_THROW(chi2_1_density(-0.1), DomainError);
}

TEST(Vote, EvenAndDecreasing) {
  EXPECT_NEAR(vote(1.0), 0.24197, 1e-5);
  EXPECT_EQ(vote(-1.0), vote(1.0));
  double prev = vote(0.1);
  for (double r = 0.2; r < 8.0; r += 0.1) {
    EXPECT_LT(vote(r), prev);
    prev = vote(r);
  }
}

TEST(ComponentLogDensity, Examples) {
  const double mode = -std::log(5.0 * std::sqrt(kTwoPi));
  EXPECT_NEAR(component_log_density(StateVector{}, meas(100.0, {0, 0, 100}, 5.0)), mode, 1e-12);
  EXPECT_NEAR(component_log_density(StateVector{}, meas(105.0, {0, 0, 100}, 5.0)), mode - 0.5, 1e-12);
  EXPECT_NEAR(component_log_density(StateVector{}, meas(105.0, {0, 0, 100}, 5.0)), -3.0283, 1e-4);
}

TEST(GmmLogLikelihood, Examples) {
  EpochMeasurements e;
  e.pseudoranges.push_back(meas(2e7, {0, 0, 2e7}, 5.0));
  GmmLikelihood one(e, GmmCoefficients::uniform(1));
  EXPECT_NEAR(gmm_log_likelihood(StateVector{}, one), -std::log(5.0 * std::sqrt(kTwoPi)), 1e-12);

  // Both components evaluate to the same density.
  e.pseudoranges.push_back(meas(2e7 + 5.0, {0, 0, 2e7}, 5.0));
  e.pseudoranges[0].rho = 2e7 - 5.0;
  GmmLikelihood two(e, GmmCoefficients{{0.5, 0.5}});
  const double d = component_log_density(StateVector{}, e.pseudoranges[0]);
  EXPECT_NEAR(gmm_log_likelihood(StateVector{}, two), d, 1e-12);
}

TEST(GmmLogLikelihood, ShapeMismatch) {
  EpochMeasurements e;
  e.pseudoranges.push_back(meas(2e7, {0, 0, 2e7}, 5.0));
  EXPECT_THROW(GmmLikelihood(e, GmmCoefficients::uniform(2)), InvariantError);
}

TEST(Dynamics, KnownHeadingMovesAlongIt) {
  Odometry u{10.0, std::nullopt, kPi / 2};
  const auto x = apply_dynamics(StateVector{}, u, 2.0);
  EXPECT_NEAR(x.px, 0.0, 1e-12);
  EXPECT_NEAR(x.py, 20.0, 1e-12);
  const auto held = apply_dynamics(StateVector{}, std::nullopt, 1.0);
  EXPECT_EQ(held.px, 0.0);
}

TEST(Substreams, IndependentAndReproducible) {
  auto a = make_substream(7, 1), b = make_substream(7, 1), c = make_substream(7, 2);
  const auto va = a(), vb = b(), vc = c();
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
}
