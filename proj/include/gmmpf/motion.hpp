#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "gmmpf/types.hpp"

namespace gmmpf {

using Rng = std::mt19937_64;

/// Process noise applied on top of the deterministic dynamics.
struct ProcessNoise {
  double position_sigma = 5.0;   // [m] per axis
  double heading_sigma = 0.02;   // [rad], replay states only
  double clock_sigma = 1.0;      // [m], replay states only
};

/// Deterministic dynamics f(x, u) over an interval dt.
///
/// - No odometry: the state is held (random-walk model).
/// - Known heading: moves speed*dt along the given heading.
/// - Yaw rate and a heading-carrying state: unicycle integration with the
///   midpoint heading.
/// - Otherwise speed is applied along the state heading, or east if none.
StateVector apply_dynamics(const StateVector& x, const std::optional<Odometry>& u, double dt);

/// f(x, u) plus independent Gaussian noise.
StateVector propagate_state(const StateVector& x, const std::optional<Odometry>& u, double dt,
                            const ProcessNoise& noise, Rng& rng);

/// Systematic resampling: returns `count` indices drawn from the categorical
/// distribution `weights` using one uniform offset and cumulative-sum order.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count,
                                             Rng& rng);

/// Seeds an independent generator for a named substream of a run seed.
Rng make_substream(std::uint64_t seed, std::uint64_t stream);

}  // namespace gmmpf
