#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gmmpf/types.hpp"

namespace gmmpf::testing {

/// K satellites at 20000 km height, spread in azimuth, static.
inline std::vector<SatelliteState> random_satellites(std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(1e7, 3e7);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::vector<SatelliteState> sats(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double az = kTwoPi * static_cast<double>(i) / static_cast<double>(k) + jitter(rng);
    const double d = dist(rng);
    sats[i].position = {d * std::cos(az), d * std::sin(az), 2e7};
  }
  return sats;
}

inline double true_range(const Eigen::Vector2d& p, const SatelliteState& s) {
  return (s.position - Eigen::Vector3d(p.x(), p.y(), 0.0)).norm();
}

/// Pseudoranges from `truth` with N(0, sigma) noise plus `bias[k]`.
inline EpochMeasurements make_epoch(double time, const Eigen::Vector2d& truth,
                                    const std::vector<SatelliteState>& sats, double sigma,
                                    const std::vector<double>& bias, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  EpochMeasurements e;
  e.time = time;
  for (std::size_t k = 0; k < sats.size(); ++k) {
    PseudorangeMeasurement m;
    m.sat_id = static_cast<int>(k) + 1;
    m.satellite = sats[k];
    m.sigma = sigma;
    m.rho = true_range(truth, sats[k]) + noise(rng) + (k < bias.size() ? bias[k] : 0.0);
    e.pseudoranges.push_back(m);
  }
  return e;
}

inline ParticleSet gaussian_cloud(const Eigen::Vector2d& center, double sigma, std::size_t n,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<StateVector> states(n);
  for (auto& s : states) {
    s.px = center.x() + g(rng);
    s.py = center.y() + g(rng);
  }
  return ParticleSet::uniform(std::move(states));
}

}  // namespace gmmpf::testing
