#pragma once

#include <span>

#include "gmmpf/types.hpp"

namespace gmmpf {

/// Lower clamp applied to the argument of the chi-square(1) density so that
/// a perfectly fitting particle casts a bounded vote.
inline constexpr double kVoteClamp = 1e-3;

/// Range from the receiver (altitude 0) to the satellite plus the clock-bias
/// offset when the state carries one. Throws GeometryError on zero range.
double expected_pseudorange(const StateVector& state, const SatelliteState& sat);

/// (rho - expected) / sigma.
double normalized_residual(const StateVector& state, const PseudorangeMeasurement& meas);

/// Density of the square of a standard normal at max(x, kVoteClamp).
/// Throws DomainError for negative x.
double chi2_1_density(double x);

/// Confidence a particle assigns to a measurement given its normalized
/// residual: the chi-square(1) density of residual^2.
double vote(double residual);

/// log N(rho | expected_pseudorange(state), sigma^2).
double component_log_density(const StateVector& state, const PseudorangeMeasurement& meas);

/// Gaussian-mixture measurement likelihood: one component per pseudorange,
/// mixed by gamma.
struct GmmLikelihood {
  const EpochMeasurements* measurements = nullptr;
  GmmCoefficients gamma;

  GmmLikelihood(const EpochMeasurements& m, GmmCoefficients g);

  /// log sum_k gamma_k N(rho_k | rho_hat_k(x), sigma_k^2).
  double log_likelihood(const StateVector& state) const;
};

double gmm_log_likelihood(const StateVector& state, const GmmLikelihood& gmm);

}  // namespace gmmpf
