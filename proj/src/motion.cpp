#include "gmmpf/motion.hpp"

#include <cmath>

namespace gmmpf {

StateVector apply_dynamics(const StateVector& x, const std::optional<Odometry>& u, double dt) {
  StateVector next = x;
  if (!u) return next;

  double direction = 0.0;
  if (u->heading) {
    direction = *u->heading;
    if (next.heading) next.heading = wrap_angle(*u->heading);
  } else if (u->yaw_rate && x.heading) {
    direction = *x.heading + 0.5 * *u->yaw_rate * dt;
    next.heading = wrap_angle(*x.heading + *u->yaw_rate * dt);
  } else if (x.heading) {
    direction = *x.heading;
  }
  next.px += u->speed * dt * std::cos(direction);
  next.py += u->speed * dt * std::sin(direction);
  return next;
}

StateVector propagate_state(const StateVector& x, const std::optional<Odometry>& u, double dt,
                            const ProcessNoise& noise, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  StateVector next = apply_dynamics(x, u, dt);
  next.px += noise.position_sigma * normal(rng);
  next.py += noise.position_sigma * normal(rng);
  if (next.heading) next.heading = wrap_angle(*next.heading + noise.heading_sigma * normal(rng));
  if (next.clock_bias) *next.clock_bias += noise.clock_sigma * normal(rng);
  return next;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count,
                                             Rng& rng) {
  std::vector<std::size_t> indices;
  if (weights.empty() || count == 0) return indices;
  indices.reserve(count);

  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw DegenerateWeightsError("cannot resample weights with no mass");

  const double step = total / static_cast<double>(count);
  std::uniform_real_distribution<double> offset(0.0, step);
  double u = offset(rng);
  double cumulative = weights[0];
  std::size_t j = 0;
  for (std::size_t m = 0; m < count; ++m) {
    while (u >= cumulative && j + 1 < weights.size()) {
      ++j;
      cumulative += weights[j];
    }
    // Rounding in the running sum can push u past the last positive weight.
    std::size_t pick = j;
    while (weights[pick] <= 0.0 && pick > 0) --pick;
    indices.push_back(pick);
    u += step;
  }
  return indices;
}

Rng make_substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace gmmpf
