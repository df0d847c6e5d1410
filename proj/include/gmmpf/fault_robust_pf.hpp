#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gmmpf/measurement_model.hpp"
#include "gmmpf/motion.hpp"
#include "gmmpf/types.hpp"

namespace gmmpf {

struct FilterConfig {
  std::size_t num_particles = 500;
  double propagation_sigma = 5.0;  // sigma_f [m]
  /// When set, overrides the per-measurement sigma carried by the epoch.
  std::optional<double> measurement_sigma;
  double init_sigma = 5.0;  // [m]
  int em_iterations = 1;
  /// Stop the EM loop early once max_k |delta gamma_k| drops below this.
  double em_tolerance = 1e-4;
  /// Adds the propagated parent weight to the GMM log-weights.
  bool include_prior_in_weighting = true;
  std::uint64_t rng_seed = 0;

  // Replay-mode state components.
  double heading_propagation_sigma = 0.02;  // [rad]
  double clock_propagation_sigma = 1.0;     // [m]
  double init_heading_sigma = 0.05;         // [rad]
  double init_clock_sigma = 5.0;            // [m]

  void validate() const;
  ProcessNoise process_noise() const;
};

/// Row-major N x K matrix of votes.
using VoteMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Copies every particle K times (one per measurement), moves each copy
/// through the dynamics with independent noise, and assigns log(w / K).
/// Particle (i, k) is stored at index i * K + k. Throws InvariantError when
/// K = 0; callers run a prediction-only update instead.
std::vector<ExtendedParticle> propagate(const ParticleSet& prev, const std::optional<Odometry>& odometry,
                                        double dt, std::size_t num_measurements,
                                        const ProcessNoise& noise, Rng& rng);

/// v(i, k) = vote(residual of measurement k at copy (i, k)).
VoteMatrix compute_votes(std::span<const ExtendedParticle> extended,
                         const EpochMeasurements& measurements);

struct PoolResult {
  GmmCoefficients gamma;
  /// Set when every weighted vote was zero and gamma fell back to uniform.
  bool fallback_uniform = false;
};

/// EM maximization step: gamma_k proportional to sum_i w(i,k) v(i,k),
/// normalized over all k.
PoolResult pool_votes(const VoteMatrix& votes, std::span<const double> extended_weights);

/// New weights of the extended particles under the categorical form of the
/// mixture likelihood: log gamma_k + log N_k(x) [+ prior log-weight].
std::vector<double> gmm_weighting(std::span<const ExtendedParticle> extended,
                                  const EpochMeasurements& measurements,
                                  const GmmCoefficients& gamma, bool include_prior);

struct WeightingResult {
  std::vector<double> weights;
  GmmCoefficients gamma;
  VoteMatrix votes;
  int iterations = 0;
  bool fallback_uniform = false;
};

/// Alternates vote pooling and GMM weighting starting from uniform gamma.
WeightingResult iterative_weighting(std::span<const ExtendedParticle> extended,
                                    const EpochMeasurements& measurements,
                                    const FilterConfig& config);

/// SIR over the N*K weighted copies, reduced to `count` equally weighted
/// particles; the measurement association is dropped.
ParticleSet reduced_resample(std::span<const ExtendedParticle> extended,
                             std::span<const double> weights, std::size_t count, Rng& rng);

/// Weighted mean; heading (if present) uses the circular mean.
StateVector mean_estimate(const ParticleSet& particles);

/// Replaces each measurement's sigma with `sigma`.
EpochMeasurements with_sigma(const EpochMeasurements& epoch, double sigma);

struct StepResult {
  StateVector estimate;
  ParticleSet posterior;
  GmmCoefficients gamma;
  /// Predicted distribution (N*K copies with prior weights), used by the
  /// integrity monitor.
  ParticleSet propagated;
  bool prediction_only = false;
};

/// Particle filter with a Gaussian-mixture measurement likelihood whose
/// mixture weights are re-estimated every epoch from particle votes.
class FaultRobustParticleFilter {
 public:
  explicit FaultRobustParticleFilter(FilterConfig config);

  /// Draws N particles around the initial fix with sigma_init. Heading and
  /// clock bias are perturbed only when the fix carries them.
  void initialize(const StateVector& initial_fix, double time);

  StepResult step(const EpochMeasurements& epoch);

  bool initialized() const { return initialized_; }
  const ParticleSet& particles() const { return particles_; }
  const FilterConfig& config() const { return config_; }

 private:
  FilterConfig config_;
  Rng rng_;
  ParticleSet particles_;
  double last_time_ = 0.0;
  bool initialized_ = false;
};

}  // namespace gmmpf
