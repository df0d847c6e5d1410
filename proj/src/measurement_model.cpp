#include "gmmpf/measurement_model.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace gmmpf {

namespace {
const double kLogSqrtTwoPi = 0.5 * std::log(kTwoPi);
}  // namespace

double expected_pseudorange(const StateVector& state, const SatelliteState& sat) {
  const Eigen::Vector3d receiver(state.px, state.py, 0.0);
  const double range = (sat.position - receiver).norm();
  if (!(range > 0.0)) throw GeometryError("receiver coincides with satellite");
  return range + state.clock_bias.value_or(0.0);
}

double normalized_residual(const StateVector& state, const PseudorangeMeasurement& meas) {
  return (meas.rho - expected_pseudorange(state, meas.satellite)) / meas.sigma;
}

double chi2_1_density(double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("chi-square density needs x >= 0");
  const double xc = std::max(x, kVoteClamp);
  return std::exp(-0.5 * xc - kLogSqrtTwoPi) / std::sqrt(xc);
}

double vote(double residual) { return chi2_1_density(residual * residual); }

double component_log_density(const StateVector& state, const PseudorangeMeasurement& meas) {
  const double r = normalized_residual(state, meas);
  return -0.5 * r * r - std::log(meas.sigma) - kLogSqrtTwoPi;
}

GmmLikelihood::GmmLikelihood(const EpochMeasurements& m, GmmCoefficients g)
    : measurements(&m), gamma(std::move(g)) {
  if (gamma.size() != m.size()) {
    throw InvariantError("mixture size does not match the measurement count");
  }
}

double GmmLikelihood::log_likelihood(const StateVector& state) const {
  const auto& ms = measurements->pseudoranges;
  std::vector<double> terms(ms.size());
  for (std::size_t k = 0; k < ms.size(); ++k) {
    terms[k] = gamma.gamma[k] > 0.0
                   ? std::log(gamma.gamma[k]) + component_log_density(state, ms[k])
                   : -std::numeric_limits<double>::infinity();
  }
  return log_sum_exp(terms);
}

double gmm_log_likelihood(const StateVector& state, const GmmLikelihood& gmm) {
  return gmm.log_likelihood(state);
}

}  // namespace gmmpf
