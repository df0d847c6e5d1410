#include "gmmpf/integrity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "gmmpf/cubature.hpp"

namespace gmmpf {

void IntegrityConfig::validate() const {
  if (!(alarm_limit > 0.0)) throw InvariantError("alarm limit must be positive");
  if (pmir_threshold < 0.0 || pmir_threshold > 1.0) {
    throw InvariantError("P_MIR threshold must lie in [0, 1]");
  }
  if (accuracy_threshold < 0.0) throw InvariantError("accuracy threshold must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvariantError("alpha must lie in (0, 1)");
  if (cubature_order < 1) throw InvariantError("cubature order must be >= 1");
}

Eigen::Matrix2d weighted_covariance(const ParticleSet& particles) {
  double sum_sq = 0.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < particles.size(); ++i) {
    sum_sq += particles.weights[i] * particles.weights[i];
    mean += particles.weights[i] * particles.particles[i].position();
  }
  if (particles.size() < 2 || sum_sq >= 1.0 - 1e-12) {
    throw DegenerateWeightsError("covariance needs more than one effective particle");
  }
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const Eigen::Vector2d d = particles.particles[i].position() - mean;
    c += particles.weights[i] * d * d.transpose();
  }
  c /= (1.0 - sum_sq);
  return 0.5 * (c + c.transpose());
}

AccuracyResult accuracy(const Eigen::Matrix2d& covariance, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), alpha);
  const double s = std::sqrt(std::max(covariance(0, 0), covariance(1, 1)));
  const double r = s * z;
  return {r, r <= 0.0};
}

PmirResult p_mir(const GmmCoefficients& gamma, const EpochMeasurements& measurements,
                 const ParticleSet& propagated, const StateVector& estimate,
                 const IntegrityConfig& config) {
  const GmmLikelihood gmm(measurements, gamma);
  const Eigen::Vector2d center = estimate.position();
  const double al = config.alarm_limit;
  PmirResult out;

  std::vector<double> log_terms;
  log_terms.reserve(propagated.size());
  for (std::size_t i = 0; i < propagated.size(); ++i) {
    const double w = propagated.weights[i];
    const auto& x = propagated.particles[i];
    if ((x.position() - center).norm() <= al) out.prior_mass += w;
    if (w > 0.0) log_terms.push_back(std::log(w) + gmm.log_likelihood(x));
  }
  out.prior_mass = std::min(out.prior_mass, 1.0);
  const double log_evidence = log_sum_exp(log_terms);

  const double area = kPi * al * al;
  std::vector<double> node_terms;
  for (const auto& node : disk_rule(center, al, config.cubature_order)) {
    StateVector x = estimate;
    x.px = node.point.x();
    x.py = node.point.y();
    node_terms.push_back(std::log(node.weight / area) + gmm.log_likelihood(x));
  }
  const double log_mean_density = log_sum_exp(node_terms);
  out.mean_density_in_disk = std::exp(log_mean_density);

  if (!std::isfinite(log_evidence)) {
    out.zero_evidence = true;
    out.p_mir = 1.0;
    return out;
  }
  out.evidence = std::exp(log_evidence);
  if (out.prior_mass <= 0.0) {
    out.p_mir = 1.0;
    return out;
  }
  const double log_ratio = std::log(out.prior_mass) + log_mean_density - log_evidence;
  out.p_mir = std::clamp(1.0 - std::exp(log_ratio), 0.0, 1.0);
  return out;
}

double bayesian_pmir(const ParticleSet& posterior, const StateVector& estimate, double alarm_limit) {
  const Eigen::Vector2d center = estimate.position();
  double outside = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    if ((posterior.particles[i].position() - center).norm() > alarm_limit) {
      outside += posterior.weights[i];
    }
  }
  return std::clamp(outside, 0.0, 1.0);
}

bool availability(double p_mir, double r_a, const IntegrityConfig& config) {
  return p_mir <= config.pmir_threshold && r_a <= config.accuracy_threshold;
}

namespace {

AccuracyResult accuracy_or_zero(const ParticleSet& posterior, double alpha) {
  try {
    return accuracy(weighted_covariance(posterior), alpha);
  } catch (const DegenerateWeightsError&) {
    return {0.0, true};
  }
}

}  // namespace

IntegrityReport monitor_integrity(const GmmCoefficients& gamma, const EpochMeasurements& measurements,
                                  const ParticleSet& propagated, const ParticleSet& posterior,
                                  const StateVector& estimate, const IntegrityConfig& config) {
  IntegrityReport report;
  const auto pm = p_mir(gamma, measurements, propagated, estimate, config);
  report.p_mir = pm.p_mir;
  report.prior_mass_in_disk = pm.prior_mass;
  report.zero_evidence = pm.zero_evidence;
  const auto acc = accuracy_or_zero(posterior, config.alpha);
  report.r_a = std::max(acc.r_a, 0.0);
  report.nonpositive_accuracy = acc.nonpositive;
  report.available = availability(report.p_mir, report.r_a, config);
  return report;
}

IntegrityReport monitor_bayesian(const ParticleSet& posterior, const StateVector& estimate,
                                 const IntegrityConfig& config) {
  IntegrityReport report;
  report.p_mir = bayesian_pmir(posterior, estimate, config.alarm_limit);
  report.prior_mass_in_disk = 1.0 - report.p_mir;
  const auto acc = accuracy_or_zero(posterior, config.alpha);
  report.r_a = std::max(acc.r_a, 0.0);
  report.nonpositive_accuracy = acc.nonpositive;
  report.available = availability(report.p_mir, report.r_a, config);
  return report;
}

}  // namespace gmmpf
