#include "gmmpf/fault_robust_pf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmmpf {

void FilterConfig::validate() const {
  if (num_particles < 1) throw InvariantError("num_particles must be >= 1");
  if (!(propagation_sigma > 0.0) || !(init_sigma > 0.0)) {
    throw InvariantError("filter sigmas must be positive");
  }
  if (measurement_sigma && !(*measurement_sigma > 0.0)) {
    throw InvariantError("measurement sigma must be positive");
  }
  if (em_iterations < 1) throw InvariantError("em_iterations must be >= 1");
}

ProcessNoise FilterConfig::process_noise() const {
  return {propagation_sigma, heading_propagation_sigma, clock_propagation_sigma};
}

std::vector<ExtendedParticle> propagate(const ParticleSet& prev, const std::optional<Odometry>& odometry,
                                        double dt, std::size_t num_measurements,
                                        const ProcessNoise& noise, Rng& rng) {
  if (num_measurements == 0) throw InvariantError("epoch has no measurements to associate");
  const double log_k = std::log(static_cast<double>(num_measurements));
  std::vector<ExtendedParticle> out;
  out.reserve(prev.size() * num_measurements);
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const double log_w = prev.weights[i] > 0.0 ? std::log(prev.weights[i]) - log_k
                                               : -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < num_measurements; ++k) {
      out.push_back({propagate_state(prev.particles[i], odometry, dt, noise, rng), i, k, log_w});
    }
  }
  return out;
}

VoteMatrix compute_votes(std::span<const ExtendedParticle> extended,
                         const EpochMeasurements& measurements) {
  const std::size_t k_count = measurements.size();
  if (k_count == 0 || extended.size() % k_count != 0) {
    throw InvariantError("extended particle count is not a multiple of K");
  }
  const std::size_t n = extended.size() / k_count;
  VoteMatrix votes(n, k_count);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto& p = extended[i * k_count + k];
      votes(i, k) = vote(normalized_residual(p.state, measurements.pseudoranges[k]));
    }
  }
  return votes;
}

PoolResult pool_votes(const VoteMatrix& votes, std::span<const double> extended_weights) {
  const auto n = static_cast<std::size_t>(votes.rows());
  const auto k_count = static_cast<std::size_t>(votes.cols());
  if (extended_weights.size() != n * k_count) {
    throw InvariantError("weights do not match the vote matrix shape");
  }
  std::vector<double> pooled(k_count, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      pooled[k] += extended_weights[i * k_count + k] * votes(i, k);
    }
  }
  double total = 0.0;
  for (double p : pooled) total += p;
  if (!(total > 0.0) || !std::isfinite(total)) {
    return {GmmCoefficients::uniform(k_count), true};
  }
  for (double& p : pooled) p /= total;
  return {GmmCoefficients{std::move(pooled)}, false};
}

std::vector<double> gmm_weighting(std::span<const ExtendedParticle> extended,
                                  const EpochMeasurements& measurements,
                                  const GmmCoefficients& gamma, bool include_prior) {
  const std::size_t k_count = measurements.size();
  if (gamma.size() != k_count) throw InvariantError("gamma size does not match K");
  std::vector<double> log_gamma(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    log_gamma[k] = gamma.gamma[k] > 0.0 ? std::log(gamma.gamma[k])
                                        : -std::numeric_limits<double>::infinity();
  }
  std::vector<double> logw(extended.size());
  for (std::size_t j = 0; j < extended.size(); ++j) {
    const auto& p = extended[j];
    const std::size_t k = p.measurement;
    if (log_gamma[k] == -std::numeric_limits<double>::infinity()) {
      logw[j] = log_gamma[k];
      continue;
    }
    logw[j] = log_gamma[k] + component_log_density(p.state, measurements.pseudoranges[k]);
    if (include_prior) logw[j] += p.log_weight;
  }
  return normalize_log_weights(logw);
}

WeightingResult iterative_weighting(std::span<const ExtendedParticle> extended,
                                    const EpochMeasurements& measurements,
                                    const FilterConfig& config) {
  if (config.em_iterations < 1) throw InvariantError("em_iterations must be >= 1");
  WeightingResult result;
  result.gamma = GmmCoefficients::uniform(measurements.size());
  result.votes = compute_votes(extended, measurements);

  std::vector<double> prior(extended.size());
  for (std::size_t j = 0; j < extended.size(); ++j) prior[j] = extended[j].log_weight;
  result.weights = normalize_log_weights(prior);

  for (int it = 0; it < config.em_iterations; ++it) {
    auto pooled = pool_votes(result.votes, result.weights);
    result.fallback_uniform = result.fallback_uniform || pooled.fallback_uniform;
    double change = 0.0;
    for (std::size_t k = 0; k < pooled.gamma.size(); ++k) {
      change = std::max(change, std::abs(pooled.gamma.gamma[k] - result.gamma.gamma[k]));
    }
    result.gamma = std::move(pooled.gamma);
    result.weights = gmm_weighting(extended, measurements, result.gamma,
                                   config.include_prior_in_weighting);
    result.iterations = it + 1;
    if (it > 0 && change < config.em_tolerance) break;
  }
  return result;
}

ParticleSet reduced_resample(std::span<const ExtendedParticle> extended,
                             std::span<const double> weights, std::size_t count, Rng& rng) {
  if (extended.size() != weights.size()) throw InvariantError("weights do not match particles");
  const auto picks = systematic_resample(weights, count, rng);
  std::vector<StateVector> states;
  states.reserve(count);
  for (auto idx : picks) states.push_back(extended[idx].state);
  return ParticleSet::uniform(std::move(states));
}

StateVector mean_estimate(const ParticleSet& particles) {
  if (particles.particles.empty()) throw InvariantError("cannot average an empty set");
  StateVector mean;
  double sx = 0.0, sy = 0.0, ss = 0.0, sc = 0.0, sb = 0.0;
  const auto& first = particles.particles.front();
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const double w = particles.weights[i];
    const auto& p = particles.particles[i];
    sx += w * p.px;
    sy += w * p.py;
    if (first.heading) {
      ss += w * std::sin(p.heading.value_or(0.0));
      sc += w * std::cos(p.heading.value_or(0.0));
    }
    if (first.clock_bias) sb += w * p.clock_bias.value_or(0.0);
  }
  mean.px = sx;
  mean.py = sy;
  if (first.heading) mean.heading = wrap_angle(std::atan2(ss, sc));
  if (first.clock_bias) mean.clock_bias = sb;
  return mean;
}

EpochMeasurements with_sigma(const EpochMeasurements& epoch, double sigma) {
  EpochMeasurements out = epoch;
  for (auto& m : out.pseudoranges) m.sigma = sigma;
  return out;
}

FaultRobustParticleFilter::FaultRobustParticleFilter(FilterConfig config)
    : config_(std::move(config)), rng_(make_substream(config_.rng_seed, 0x5046)) {
  config_.validate();
}

void FaultRobustParticleFilter::initialize(const StateVector& initial_fix, double time) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<StateVector> states(config_.num_particles, initial_fix);
  for (auto& s : states) {
    s.px += config_.init_sigma * normal(rng_);
    s.py += config_.init_sigma * normal(rng_);
    if (s.heading) s.heading = wrap_angle(*s.heading + config_.init_heading_sigma * normal(rng_));
    if (s.clock_bias) *s.clock_bias += config_.init_clock_sigma * normal(rng_);
  }
  particles_ = ParticleSet::uniform(std::move(states));
  last_time_ = time;
  initialized_ = true;
}

StepResult FaultRobustParticleFilter::step(const EpochMeasurements& raw_epoch) {
  if (!initialized_) throw InvariantError("filter used before initialize()");
  const double dt = raw_epoch.time - last_time_;
  if (!(dt > 0.0)) throw InvariantError("epoch times must be strictly increasing");
  last_time_ = raw_epoch.time;

  const EpochMeasurements epoch =
      config_.measurement_sigma ? with_sigma(raw_epoch, *config_.measurement_sigma) : raw_epoch;
  const ProcessNoise noise = config_.process_noise();

  StepResult result;
  if (epoch.pseudoranges.empty()) {
    for (auto& p : particles_.particles) {
      p = propagate_state(p, epoch.odometry, dt, noise, rng_);
    }
    result.prediction_only = true;
    result.posterior = particles_;
    result.propagated = particles_;
    result.estimate = mean_estimate(particles_);
    return result;
  }

  const auto extended = propagate(particles_, epoch.odometry, dt, epoch.size(), noise, rng_);
  auto weighting = iterative_weighting(extended, epoch, config_);

  result.propagated.particles.reserve(extended.size());
  result.propagated.weights.reserve(extended.size());
  for (const auto& p : extended) {
    result.propagated.particles.push_back(p.state);
    result.propagated.weights.push_back(std::exp(p.log_weight));
  }

  particles_ = reduced_resample(extended, weighting.weights, config_.num_particles, rng_);
  result.posterior = particles_;
  result.gamma = std::move(weighting.gamma);
  result.estimate = mean_estimate(particles_);
  return result;
}

}  // namespace gmmpf
