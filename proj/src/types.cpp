#include "gmmpf/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gmmpf {

double wrap_angle(double angle) {
  double a = std::fmod(angle + kPi, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  a -= kPi;
  // fmod can land exactly on +pi after the shift because of rounding.
  if (a >= kPi) a -= kTwoPi;
  return a;
}

void StateVector::validate() const {
  if (!std::isfinite(px) || !std::isfinite(py)) {
    throw InvariantError("state position must be finite");
  }
  if (heading) {
    if (!std::isfinite(*heading)) throw InvariantError("heading must be finite");
    if (*heading < -kPi || *heading >= kPi) {
      throw InvariantError("heading must lie in [-pi, pi)");
    }
  }
  if (clock_bias && !std::isfinite(*clock_bias)) {
    throw InvariantError("clock bias must be finite");
  }
}

ParticleSet ParticleSet::uniform(std::vector<StateVector> states) {
  ParticleSet set;
  const double w = states.empty() ? 0.0 : 1.0 / static_cast<double>(states.size());
  set.weights.assign(states.size(), w);
  set.particles = std::move(states);
  return set;
}

void ParticleSet::validate() const {
  if (particles.empty()) throw InvariantError("particle set is empty");
  if (particles.size() != weights.size()) {
    throw InvariantError("particles and weights differ in length");
  }
  if (!is_simplex(weights)) throw InvariantError("particle weights are not a simplex");
}

void SatelliteState::validate() const {
  if (!position.allFinite() || position.norm() <= 0.0) {
    throw InvariantError("satellite position must be finite and nonzero");
  }
  if (!velocity.allFinite()) throw InvariantError("satellite velocity must be finite");
}

void PseudorangeMeasurement::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvariantError("pseudorange must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvariantError("sigma must be positive");
  satellite.validate();
}

void EpochMeasurements::validate() const {
  if (pseudoranges.empty()) throw InvariantError("epoch has no pseudoranges");
  for (const auto& m : pseudoranges) m.validate();
}

GmmCoefficients GmmCoefficients::uniform(std::size_t k) {
  if (k == 0) throw InvariantError("mixture needs at least one component");
  return {std::vector<double>(k, 1.0 / static_cast<double>(k))};
}

void GmmCoefficients::validate() const {
  if (gamma.empty()) throw InvariantError("mixture has no components");
  if (!is_simplex(gamma)) throw InvariantError("mixture weights are not a simplex");
}

double log_sum_exp(std::span<const double> values) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (values.empty()) return kNegInf;
  const double m = *std::max_element(values.begin(), values.end());
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) throw DegenerateWeightsError("no log-weights to normalize");
  const double m = *std::max_element(log_weights.begin(), log_weights.end());
  if (m == -std::numeric_limits<double>::infinity()) {
    throw DegenerateWeightsError("all log-weights are -inf");
  }
  if (!std::isfinite(m)) throw DegenerateWeightsError("log-weights contain non-finite values");

  std::vector<double> w(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (std::isnan(log_weights[i])) throw DegenerateWeightsError("log-weight is NaN");
    w[i] = std::exp(log_weights[i] - m);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

double effective_sample_size(std::span<const double> weights) {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  if (sq <= 0.0) throw DegenerateWeightsError("weights carry no mass");
  return 1.0 / sq;
}

bool is_simplex(std::span<const double> weights, double tol) {
  if (weights.empty()) return false;
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) return false;
    total += w;
  }
  return std::abs(total - 1.0) <= tol;
}

}  // namespace gmmpf
