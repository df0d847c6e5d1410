#pragma once

#include <Eigen/Core>

#include "gmmpf/measurement_model.hpp"
#include "gmmpf/types.hpp"

namespace gmmpf {

struct IntegrityConfig {
  double alarm_limit = 15.0;         // AL [m]
  double pmir_threshold = 0.05;      // P0_MIR
  double accuracy_threshold = 10.0;  // r0_A [m]
  double alpha = 0.5;
  int cubature_order = 8;

  void validate() const;
};

struct IntegrityReport {
  double p_mir = 1.0;
  double r_a = 0.0;
  bool available = false;
  double prior_mass_in_disk = 0.0;
  /// Evidence P(M | u, pi) underflowed; p_mir forced to 1.
  bool zero_evidence = false;
  /// alpha <= 0.5 makes r_a nonpositive.
  bool nonpositive_accuracy = false;
};

/// Weighted horizontal covariance with the (1 - sum w^2)^-1 unbiasing factor.
/// Throws DegenerateWeightsError when sum w^2 >= 1.
Eigen::Matrix2d weighted_covariance(const ParticleSet& particles);

struct AccuracyResult {
  double r_a = 0.0;
  bool nonpositive = false;
};

/// max_i sqrt(C_ii) * Phi^-1(alpha).
AccuracyResult accuracy(const Eigen::Matrix2d& covariance, double alpha);

struct PmirResult {
  double p_mir = 1.0;
  double prior_mass = 0.0;
  double evidence = 0.0;
  double mean_density_in_disk = 0.0;
  bool zero_evidence = false;
};

/// Misleading-information risk from the mixture likelihood. The prior mass
/// inside the alarm disk comes from the propagated particles; the mixture
/// density is averaged over the disk by cubature, treating the conditional
/// distribution inside the disk as uniform. Clamped to [0, 1].
PmirResult p_mir(const GmmCoefficients& gamma, const EpochMeasurements& measurements,
                 const ParticleSet& propagated, const StateVector& estimate,
                 const IntegrityConfig& config);

/// Posterior mass of particles outside the alarm disk about the estimate.
double bayesian_pmir(const ParticleSet& posterior, const StateVector& estimate, double alarm_limit);

bool availability(double p_mir, double r_a, const IntegrityConfig& config);

/// Full monitor output for one epoch of the proposed filter.
IntegrityReport monitor_integrity(const GmmCoefficients& gamma, const EpochMeasurements& measurements,
                                  const ParticleSet& propagated, const ParticleSet& posterior,
                                  const StateVector& estimate, const IntegrityConfig& config);

/// Bayesian-RAIM style report: p_mir from the posterior tail mass.
IntegrityReport monitor_bayesian(const ParticleSet& posterior, const StateVector& estimate,
                                 const IntegrityConfig& config);

}  // namespace gmmpf
