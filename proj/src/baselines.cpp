#include "gmmpf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "gmmpf/fault_robust_pf.hpp"
#include "gmmpf/measurement_model.hpp"

namespace gmmpf {

namespace {

// d(range)/d(state) for the (px, py[, clock]) block.
Eigen::RowVectorXd range_jacobian(const StateVector& x, const SatelliteState& sat, Eigen::Index dim) {
  const Eigen::Vector3d receiver(x.px, x.py, 0.0);
  const Eigen::Vector3d los = receiver - sat.position;
  const double range = los.norm();
  if (!(range > 0.0)) throw GeometryError("receiver coincides with satellite");
  Eigen::RowVectorXd h = Eigen::RowVectorXd::Zero(dim);
  h(0) = los.x() / range;
  h(1) = los.y() / range;
  if (dim > 2) h(2) = 1.0;
  return h;
}

void apply_increment(StateVector& x, const Eigen::VectorXd& dx) {
  x.px += dx(0);
  x.py += dx(1);
  if (dx.size() > 2 && x.clock_bias) *x.clock_bias += dx(2);
}

}  // namespace

KfState kf_predict(const KfState& kf, const std::optional<Odometry>& odometry, double dt,
                   double propagation_sigma) {
  KfState out;
  out.mean = apply_dynamics(kf.mean, odometry, dt);
  const Eigen::Index n = kf.covariance.rows();
  out.covariance = kf.covariance + propagation_sigma * propagation_sigma * Eigen::MatrixXd::Identity(n, n);
  return out;
}

GlobalTestResult raim_global_test(const std::vector<double>& residuals, int state_dim, double p_fa) {
  GlobalTestResult result;
  const int dof = static_cast<int>(residuals.size()) - state_dim;
  if (dof <= 0) return result;
  for (double r : residuals) result.statistic += r * r;
  result.threshold =
      boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), 1.0 - p_fa);
  result.outcome =
      result.statistic <= result.threshold ? GlobalTestOutcome::kPass : GlobalTestOutcome::kFail;
  return result;
}

LocalTestResult raim_local_test(const std::vector<double>& residuals, double p_fa) {
  if (residuals.empty()) throw InvariantError("local test needs at least one residual");
  LocalTestResult result;
  double worst = -1.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (std::abs(residuals[i]) > worst) {
      worst = std::abs(residuals[i]);
      result.index = i;
    }
  }
  result.threshold =
      boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - p_fa / 2.0);
  result.exclude = worst > result.threshold;
  return result;
}

SnapshotFix least_squares_fix(const StateVector& initial,
                              const std::vector<PseudorangeMeasurement>& measurements,
                              int iterations) {
  const Eigen::Index dim = initial.clock_bias ? 3 : 2;
  const auto m = static_cast<Eigen::Index>(measurements.size());
  if (m < dim) throw InvariantError("not enough measurements for a least-squares fix");
  SnapshotFix fix{initial, {}};
  Eigen::MatrixXd h(m, dim);
  Eigen::VectorXd r(m);
  for (int it = 0; it < iterations; ++it) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& meas = measurements[static_cast<std::size_t>(j)];
      h.row(j) = range_jacobian(fix.state, meas.satellite, dim) / meas.sigma;
      r(j) = normalized_residual(fix.state, meas);
    }
    const Eigen::VectorXd dx = h.colPivHouseholderQr().solve(r);
    apply_increment(fix.state, dx);
    if (dx.norm() < 1e-6) break;
  }
  fix.residuals.resize(measurements.size());
  for (std::size_t j = 0; j < measurements.size(); ++j) {
    fix.residuals[j] = normalized_residual(fix.state, measurements[j]);
  }
  return fix;
}

KfRaimStepResult kf_raim_step(const KfState& kf, const EpochMeasurements& raw_epoch, double dt,
                              const KfRaimConfig& config) {
  const EpochMeasurements epoch =
      config.measurement_sigma ? with_sigma(raw_epoch, *config.measurement_sigma) : raw_epoch;
  KfRaimStepResult result;
  result.state = kf_predict(kf, epoch.odometry, dt, config.propagation_sigma);
  const Eigen::Index dim = result.state.dim();
  const int state_dim = static_cast<int>(dim);

  std::vector<PseudorangeMeasurement> survivors = epoch.pseudoranges;
  while (static_cast<int>(survivors.size()) > state_dim) {
    const auto fix = least_squares_fix(result.state.mean, survivors, config.ls_iterations);
    const auto global = raim_global_test(fix.residuals, state_dim, config.p_fa_global);
    if (global.passed()) {
      result.global_passed = true;
      break;
    }
    if (static_cast<int>(survivors.size()) <= state_dim + 1) break;
    const auto local = raim_local_test(fix.residuals, config.p_fa_local);
    if (!local.exclude) break;
    result.excluded_sat_ids.push_back(survivors[local.index].sat_id);
    survivors.erase(survivors.begin() + static_cast<std::ptrdiff_t>(local.index));
  }

  if (survivors.empty()) {
    result.prediction_only = true;
    return result;
  }

  // Sequential scalar updates, linearized at the predicted mean.
  KfState& s = result.state;
  const StateVector linearization = s.mean;
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(dim);
  for (const auto& meas : survivors) {
    const Eigen::RowVectorXd h = range_jacobian(linearization, meas.satellite, dim);
    const double predicted = expected_pseudorange(linearization, meas.satellite) + h.dot(dx);
    const double innovation = meas.rho - predicted;
    const double var = meas.sigma * meas.sigma;
    const Eigen::VectorXd ph = s.covariance * h.transpose();
    const double sy = h.dot(ph) + var;
    const Eigen::VectorXd gain = ph / sy;
    dx += gain * innovation;
    // Joseph form keeps the covariance PSD.
    const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(dim, dim) - gain * h;
    s.covariance = ikh * s.covariance * ikh.transpose() + var * gain * gain.transpose();
    s.covariance = 0.5 * (s.covariance + s.covariance.transpose());
  }
  apply_increment(s.mean, dx);
  return result;
}

void KfRaimFilter::initialize(const StateVector& initial_fix, double time) {
  state_.mean = initial_fix;
  const Eigen::Index n = state_.dim();
  state_.covariance = config_.init_sigma * config_.init_sigma * Eigen::MatrixXd::Identity(n, n);
  last_time_ = time;
}

KfRaimStepResult KfRaimFilter::step(const EpochMeasurements& epoch) {
  const double dt = epoch.time - last_time_;
  if (!(dt > 0.0)) throw InvariantError("epoch times must be strictly increasing");
  last_time_ = epoch.time;
  auto result = kf_raim_step(state_, epoch, dt, config_);
  state_ = result.state;
  return result;
}

// J-PF ------------------------------------------------------------------------

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::size_t fault_hypothesis_count(std::size_t k, int max_faults) {
  std::size_t total = 0;
  for (int j = 0; j <= max_faults; ++j) total += binomial(k, static_cast<std::size_t>(j));
  return total;
}

std::vector<std::size_t> fault_hypothesis(std::size_t k, int max_faults, std::size_t index) {
  for (int size = 0; size <= max_faults; ++size) {
    const auto sz = static_cast<std::size_t>(size);
    const std::size_t count = binomial(k, sz);
    if (index >= count) {
      index -= count;
      continue;
    }
    // Unrank the index-th lexicographic combination.
    std::vector<std::size_t> subset;
    std::size_t next = 0;
    for (std::size_t slot = 0; slot < sz; ++slot) {
      for (std::size_t c = next; c < k; ++c) {
        const std::size_t with_c = binomial(k - c - 1, sz - slot - 1);
        if (index < with_c) {
          subset.push_back(c);
          next = c + 1;
          break;
        }
        index -= with_c;
      }
    }
    return subset;
  }
  throw InvariantError("fault hypothesis index out of range");
}

double jpf_log_likelihood(const StateVector& state, const std::vector<int>& fault_set,
                          const EpochMeasurements& epoch, const JpfConfig& config) {
  double ll = 0.0;
  const double log_flat = -std::log(config.flat_width);
  for (const auto& meas : epoch.pseudoranges) {
    const bool faulted = std::binary_search(fault_set.begin(), fault_set.end(), meas.sat_id);
    if (!faulted) {
      ll += component_log_density(state, meas);
      continue;
    }
    const double residual = meas.rho - expected_pseudorange(state, meas.satellite);
    if (std::abs(residual) > config.flat_window) return -std::numeric_limits<double>::infinity();
    ll += log_flat;
  }
  return ll;
}

JpfStepResult jpf_step(std::vector<JpfParticle>& particles, const EpochMeasurements& raw_epoch,
                       double dt, const JpfConfig& config, Rng& rng) {
  if (particles.empty()) throw InvariantError("J-PF has no particles");
  const EpochMeasurements epoch =
      config.measurement_sigma ? with_sigma(raw_epoch, *config.measurement_sigma) : raw_epoch;
  const ProcessNoise noise{config.propagation_sigma, 0.02, 1.0};
  const std::size_t k = epoch.size();
  const std::size_t hypotheses = fault_hypothesis_count(k, config.max_faults);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, hypotheses == 0 ? 0 : hypotheses - 1);

  auto draw_fault_set = [&]() {
    std::vector<int> ids;
    for (auto idx : fault_hypothesis(k, config.max_faults, pick(rng))) {
      ids.push_back(epoch.pseudoranges[idx].sat_id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  std::vector<double> logw(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    auto& p = particles[i];
    p.state = propagate_state(p.state, epoch.odometry, dt, noise, rng);
    // Drop hypotheses on satellites that are no longer tracked.
    std::erase_if(p.fault_set, [&](int id) {
      return std::none_of(epoch.pseudoranges.begin(), epoch.pseudoranges.end(),
                          [id](const auto& m) { return m.sat_id == id; });
    });
    if (k > 0 && unit(rng) < config.fault_change_prob) p.fault_set = draw_fault_set();
    logw[i] = (p.weight > 0.0 ? std::log(p.weight) : -std::numeric_limits<double>::infinity()) +
              jpf_log_likelihood(p.state, p.fault_set, epoch, config);
  }

  std::vector<double> w;
  try {
    w = normalize_log_weights(logw);
  } catch (const DegenerateWeightsError&) {
    w.assign(particles.size(), 1.0 / static_cast<double>(particles.size()));
  }

  JpfStepResult result;
  result.posterior.particles.reserve(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    result.posterior.particles.push_back(particles[i].state);
    if (particles[i].fault_set.empty()) result.no_fault_mass += w[i];
  }
  result.posterior.weights = w;
  result.estimate = mean_estimate(result.posterior);

  const auto picks = systematic_resample(w, config.num_particles, rng);
  std::vector<JpfParticle> next;
  next.reserve(picks.size());
  const double uniform = 1.0 / static_cast<double>(picks.size());
  for (auto idx : picks) {
    next.push_back(particles[idx]);
    next.back().weight = uniform;
  }
  particles = std::move(next);
  return result;
}

JointParticleFilter::JointParticleFilter(JpfConfig config)
    : config_(std::move(config)), rng_(make_substream(config_.rng_seed, 0x4A5046)) {}

void JointParticleFilter::initialize(const StateVector& initial_fix, double time) {
  std::normal_distribution<double> normal(0.0, 1.0);
  particles_.assign(config_.num_particles, JpfParticle{initial_fix, {}, 0.0});
  const double w = 1.0 / static_cast<double>(config_.num_particles);
  for (auto& p : particles_) {
    p.state.px += config_.init_sigma * normal(rng_);
    p.state.py += config_.init_sigma * normal(rng_);
    p.weight = w;
  }
  last_time_ = time;
}

JpfStepResult JointParticleFilter::step(const EpochMeasurements& epoch) {
  const double dt = epoch.time - last_time_;
  if (!(dt > 0.0)) throw InvariantError("epoch times must be strictly increasing");
  last_time_ = epoch.time;
  return jpf_step(particles_, epoch, dt, config_, rng_);
}

}  // namespace gmmpf
