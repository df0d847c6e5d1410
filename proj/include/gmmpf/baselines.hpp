#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gmmpf/motion.hpp"
#include "gmmpf/types.hpp"

namespace gmmpf {

// KF-RAIM ---------------------------------------------------------------------

/// Kalman filter state. The covariance covers (px, py) and, when the mean
/// carries one, the clock bias; heading is propagated deterministically.
struct KfState {
  StateVector mean;
  Eigen::MatrixXd covariance;

  Eigen::Index dim() const { return mean.clock_bias ? 3 : 2; }
};

struct KfRaimConfig {
  double propagation_sigma = 5.0;  // [m]
  std::optional<double> measurement_sigma;
  double init_sigma = 5.0;  // [m]
  double p_fa_global = 0.05;
  double p_fa_local = 0.01;
  int ls_iterations = 6;
};

/// Mean through f(x, u); covariance P + Q with Q = sigma_f^2 I (F = I).
KfState kf_predict(const KfState& kf, const std::optional<Odometry>& odometry, double dt,
                   double propagation_sigma);

enum class GlobalTestOutcome { kPass, kFail, kInsufficientRedundancy };

struct GlobalTestResult {
  GlobalTestOutcome outcome = GlobalTestOutcome::kInsufficientRedundancy;
  double statistic = 0.0;
  double threshold = 0.0;

  bool passed() const { return outcome == GlobalTestOutcome::kPass; }
};

/// sum r^2 against the chi-square(K - state_dim) quantile at 1 - p_fa.
GlobalTestResult raim_global_test(const std::vector<double>& residuals, int state_dim,
                                  double p_fa = 0.05);

struct LocalTestResult {
  std::size_t index = 0;  // argmax |r|, lowest index on ties
  bool exclude = false;   // |r| > Phi^-1(1 - p_fa / 2)
  double threshold = 0.0;
};

LocalTestResult raim_local_test(const std::vector<double>& residuals, double p_fa = 0.01);

/// Iterated least-squares fix from `initial` using the given measurements.
/// Returns the solution and the normalized post-fit residuals.
struct SnapshotFix {
  StateVector state;
  std::vector<double> residuals;
};
SnapshotFix least_squares_fix(const StateVector& initial,
                              const std::vector<PseudorangeMeasurement>& measurements,
                              int iterations = 6);

struct KfRaimStepResult {
  KfState state;
  std::vector<int> excluded_sat_ids;
  bool global_passed = false;
  bool prediction_only = false;
};

/// Predict, exclude faults with the global/local residual tests, then apply
/// sequential scalar EKF updates with the surviving measurements.
KfRaimStepResult kf_raim_step(const KfState& kf, const EpochMeasurements& epoch, double dt,
                              const KfRaimConfig& config);

class KfRaimFilter {
 public:
  explicit KfRaimFilter(KfRaimConfig config) : config_(config) {}

  void initialize(const StateVector& initial_fix, double time);
  KfRaimStepResult step(const EpochMeasurements& epoch);

  const KfState& state() const { return state_; }

 private:
  KfRaimConfig config_;
  KfState state_;
  double last_time_ = 0.0;
};

// J-PF --------------------------------------------------------------------------

/// Particle over position and an explicit fault hypothesis: the satellite ids
/// whose pseudoranges are treated as faulted (at most max_faults of them).
struct JpfParticle {
  StateVector state;
  std::vector<int> fault_set;  // sorted satellite ids
  double weight = 0.0;
};

struct JpfConfig {
  std::size_t num_particles = 500;
  double propagation_sigma = 5.0;
  std::optional<double> measurement_sigma;
  double init_sigma = 5.0;
  int max_faults = 2;
  double fault_change_prob = 0.2;
  /// Faulted measurements get a flat density of 1 / flat_width inside a
  /// +/- flat_window residual window.
  double flat_width = 1e4;
  double flat_window = 5e3;
  std::uint64_t rng_seed = 0;
};

/// Number of fault hypotheses of size <= max_faults over k measurements.
std::size_t fault_hypothesis_count(std::size_t k, int max_faults);

/// The `index`-th subset of {0..k-1} of size <= max_faults, ordered by size
/// then lexicographically.
std::vector<std::size_t> fault_hypothesis(std::size_t k, int max_faults, std::size_t index);

/// Log-likelihood of the epoch under a particle's state and fault set.
double jpf_log_likelihood(const StateVector& state, const std::vector<int>& fault_set,
                          const EpochMeasurements& epoch, const JpfConfig& config);

struct JpfStepResult {
  StateVector estimate;
  /// Weighted particles before resampling.
  ParticleSet posterior;
  /// Posterior mass on the empty fault set.
  double no_fault_mass = 0.0;
};

/// Propagate, transition fault sets, weight, estimate, and resample to N.
JpfStepResult jpf_step(std::vector<JpfParticle>& particles, const EpochMeasurements& epoch,
                       double dt, const JpfConfig& config, Rng& rng);

class JointParticleFilter {
 public:
  explicit JointParticleFilter(JpfConfig config);

  void initialize(const StateVector& initial_fix, double time);
  JpfStepResult step(const EpochMeasurements& epoch);

  const std::vector<JpfParticle>& particles() const { return particles_; }

 private:
  JpfConfig config_;
  Rng rng_;
  std::vector<JpfParticle> particles_;
  double last_time_ = 0.0;
};

}  // namespace gmmpf
