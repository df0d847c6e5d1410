#include "gmmpf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmmpf/measurement_model.hpp"

namespace gmmpf {

void ScenarioConfig::validate() const {
  if (num_satellites < 1) throw InvariantError("need at least one satellite");
  if (max_faults < 0 || max_faults >= num_satellites) {
    throw InvariantError("max_faults must lie in [0, num_satellites)");
  }
  if (!(gnss_sigma >= 0.0) || !(odometry_sigma >= 0.0)) throw InvariantError("noise must be >= 0");
  if (bias_min > bias_max) throw InvariantError("bias range is empty");
  if (fault_change_prob < 0.0 || fault_change_prob > 1.0) {
    throw InvariantError("fault change probability must lie in [0, 1]");
  }
  if (!(duration > 0.0) || !(rate > 0.0)) throw InvariantError("duration and rate must be positive");
  if (heading_hold_min <= 0.0 || heading_hold_min > heading_hold_max) {
    throw InvariantError("heading hold interval is invalid");
  }
}

std::vector<TruthSample> generate_trajectory(const ScenarioConfig& config, Rng& rng) {
  const double dt = 1.0 / config.rate;
  const auto steps = static_cast<std::size_t>(std::llround(config.duration * config.rate));
  std::vector<TruthSample> out;
  out.reserve(steps + 1);

  if (config.shape == TrajectoryShape::kSquare) {
    const double side = config.square_side;
    for (std::size_t j = 0; j <= steps; ++j) {
      const double t = static_cast<double>(j) * dt;
      const double d = std::fmod(config.vehicle_speed * t, 4.0 * side);
      // Travel direction over the step that ends at t (east first).
      const double d_prev = j == 0 ? 0.0 : std::fmod(config.vehicle_speed * (t - dt), 4.0 * side);
      const int seg = static_cast<int>(std::min(3.0, std::floor(d_prev / side)));
      StateVector s;
      const double a = d - std::floor(d / side) * side;
      switch (static_cast<int>(std::min(3.0, std::floor(d / side)))) {
        case 0: s.px = a; s.py = 0.0; break;
        case 1: s.px = side; s.py = a; break;
        case 2: s.px = side - a; s.py = side; break;
        default: s.px = 0.0; s.py = side - a; break;
      }
      s.heading = wrap_angle(seg * kPi / 2.0);
      out.push_back({t, s});
    }
    return out;
  }

  std::uniform_real_distribution<double> heading_dist(-kPi, kPi);
  std::uniform_real_distribution<double> hold_dist(config.heading_hold_min, config.heading_hold_max);
  double heading = heading_dist(rng);
  double next_change = hold_dist(rng);
  StateVector s;
  s.heading = wrap_angle(heading);
  out.push_back({0.0, s});
  for (std::size_t j = 1; j <= steps; ++j) {
    const double t = static_cast<double>(j) * dt;
    if (t - dt >= next_change) {
      heading = heading_dist(rng);
      next_change += hold_dist(rng);
    }
    s.px += config.vehicle_speed * dt * std::cos(heading);
    s.py += config.vehicle_speed * dt * std::sin(heading);
    s.heading = wrap_angle(heading);
    out.push_back({t, s});
  }
  return out;
}

Constellation::Constellation(const ScenarioConfig& config, Rng& rng) {
  const auto n = static_cast<std::size_t>(config.num_satellites);
  min_spacing_ = kTwoPi / (2.0 * static_cast<double>(n));
  // Gaps = min spacing + uniform share of the slack (flat Dirichlet), which
  // is the rejection-sampling distribution conditioned on the spacing.
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> gaps(n);
  for (auto& g : gaps) g = expo(rng);
  const double gsum = std::accumulate(gaps.begin(), gaps.end(), 0.0);
  const double slack = kTwoPi - min_spacing_ * static_cast<double>(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> dist(config.satellite_min_horizontal,
                                              config.satellite_max_horizontal);
  double az = kTwoPi * unit(rng);
  for (std::size_t i = 0; i < n; ++i) {
    azimuths_.push_back(wrap_angle(az));
    const double horizontal = dist(rng);
    const double travel = kTwoPi * unit(rng);
    SatelliteState s;
    s.position = {horizontal * std::cos(az), horizontal * std::sin(az), config.satellite_height};
    s.velocity = {config.satellite_speed * std::cos(travel), config.satellite_speed * std::sin(travel),
                  0.0};
    initial_.push_back(s);
    az += min_spacing_ + slack * gaps[i] / gsum;
  }
}

std::vector<SatelliteState> Constellation::at(double time) const {
  std::vector<SatelliteState> out = initial_;
  for (auto& s : out) s.position += s.velocity * time;
  return out;
}

std::vector<SatelliteState> constellation_at(double time, const Constellation& constellation) {
  return constellation.at(time);
}

bool FaultState::is_faulty(int sat) const {
  return std::binary_search(faulty.begin(), faulty.end(), sat);
}

FaultState draw_fault_state(const ScenarioConfig& config, Rng& rng) {
  const auto n = static_cast<std::size_t>(config.num_satellites);
  FaultState fs;
  fs.bias.assign(n, 0.0);
  std::uniform_int_distribution<int> size_dist(0, config.max_faults);
  const int count = size_dist(rng);
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  fs.faulty.assign(ids.begin(), ids.begin() + count);
  std::sort(fs.faulty.begin(), fs.faulty.end());
  std::uniform_real_distribution<double> bias_dist(config.bias_min, config.bias_max);
  for (int id : fs.faulty) {
    fs.bias[static_cast<std::size_t>(id)] =
        config.bias_min == config.bias_max ? config.bias_min : bias_dist(rng);
  }
  return fs;
}

FaultState update_fault_state(const FaultState& fs, const ScenarioConfig& config, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < config.fault_change_prob) return draw_fault_state(config, rng);
  return fs;
}

EpochMeasurements simulate_epoch(double time, const TruthSample& truth,
                                 const std::vector<SatelliteState>& sats, const FaultState& fs,
                                 const ScenarioConfig& config, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  EpochMeasurements epoch;
  epoch.time = time;
  StateVector receiver{truth.state.px, truth.state.py, std::nullopt, std::nullopt};
  for (std::size_t k = 0; k < sats.size(); ++k) {
    const bool faulty = fs.is_faulty(static_cast<int>(k));
    const double sigma = faulty ? std::sqrt(2.0) * config.gnss_sigma : config.gnss_sigma;
    const double bias = faulty ? fs.bias[k] : 0.0;
    PseudorangeMeasurement m;
    m.sat_id = static_cast<int>(k) + 1;
    m.satellite = sats[k];
    m.rho = expected_pseudorange(receiver, sats[k]) + bias + sigma * normal(rng);
    m.sigma = config.gnss_sigma > 0.0 ? config.gnss_sigma : 1.0;
    epoch.pseudoranges.push_back(m);
  }
  epoch.odometry = Odometry{config.vehicle_speed + config.odometry_sigma * normal(rng), std::nullopt,
                            truth.state.heading};
  epoch.odometry_sigma = config.odometry_sigma;
  return epoch;
}

ScenarioRecord simulate_scenario(const ScenarioConfig& config) {
  config.validate();
  Rng traj_rng = make_substream(config.rng_seed, static_cast<std::uint64_t>(Substream::kTrajectory));
  Rng const_rng = make_substream(config.rng_seed, static_cast<std::uint64_t>(Substream::kConstellation));
  Rng fault_rng = make_substream(config.rng_seed, static_cast<std::uint64_t>(Substream::kFaults));
  Rng noise_rng = make_substream(config.rng_seed, static_cast<std::uint64_t>(Substream::kNoise));

  ScenarioRecord record;
  record.truth = generate_trajectory(config, traj_rng);
  const Constellation constellation(config, const_rng);
  FaultState fs = draw_fault_state(config, fault_rng);
  for (std::size_t j = 1; j < record.truth.size(); ++j) {
    const auto& truth = record.truth[j];
    if (j > 1) fs = update_fault_state(fs, config, fault_rng);
    record.epochs.push_back(
        simulate_epoch(truth.time, truth, constellation.at(truth.time), fs, config, noise_rng));
    for (int id : fs.faulty) {
      record.faults.push_back({truth.time, id + 1, fs.bias[static_cast<std::size_t>(id)]});
    }
  }
  return record;
}

IntegrityScenarioConfig::IntegrityScenarioConfig() {
  base.num_satellites = 10;
  base.max_faults = 6;
  base.odometry_sigma = 0.0;
}

ScenarioRecord simulate_integrity_scenario(const IntegrityScenarioConfig& config) {
  const ScenarioConfig& base = config.base;
  base.validate();
  Rng traj_rng = make_substream(base.rng_seed, static_cast<std::uint64_t>(Substream::kTrajectory));
  Rng const_rng = make_substream(base.rng_seed, static_cast<std::uint64_t>(Substream::kConstellation));
  Rng fault_rng = make_substream(base.rng_seed, static_cast<std::uint64_t>(Substream::kFaults));
  Rng noise_rng = make_substream(base.rng_seed, static_cast<std::uint64_t>(Substream::kNoise));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto n = static_cast<std::size_t>(base.num_satellites);
  const int max_faulted =
      std::max(1, static_cast<int>(std::floor(config.max_fault_fraction * static_cast<double>(n) + 1e-9)));

  ScenarioRecord record;
  record.has_odometry = false;
  record.truth = generate_trajectory(base, traj_rng);
  const Constellation constellation(base, const_rng);

  std::vector<int> faulted;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  bool drawn = false;
  auto draw = [&]() {
    std::uniform_int_distribution<int> count_dist(1, max_faulted);
    const int count = count_dist(fault_rng);
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), fault_rng);
    faulted.assign(ids.begin(), ids.begin() + count);
    std::sort(faulted.begin(), faulted.end());
    const double magnitude = config.offset_min + (config.offset_max - config.offset_min) * unit(fault_rng);
    const double direction = kTwoPi * unit(fault_rng);
    offset = {magnitude * std::cos(direction), magnitude * std::sin(direction)};
  };

  for (std::size_t j = 1; j < record.truth.size(); ++j) {
    const auto& truth = record.truth[j];
    const double t = truth.time;
    const bool in_window = t >= config.fault_start && t <= config.fault_end;
    if (in_window && (!drawn || !config.hold_fault)) {
      draw();
      drawn = true;
    }
    const auto sats = constellation.at(t);
    EpochMeasurements epoch;
    epoch.time = t;
    const StateVector receiver{truth.state.px, truth.state.py, std::nullopt, std::nullopt};
    const StateVector shifted{truth.state.px + offset.x(), truth.state.py + offset.y(), std::nullopt,
                              std::nullopt};
    for (std::size_t k = 0; k < n; ++k) {
      const bool faulty =
          in_window && std::binary_search(faulted.begin(), faulted.end(), static_cast<int>(k));
      const double true_range = expected_pseudorange(receiver, sats[k]);
      const double mean_range = faulty ? expected_pseudorange(shifted, sats[k]) : true_range;
      PseudorangeMeasurement m;
      m.sat_id = static_cast<int>(k) + 1;
      m.satellite = sats[k];
      m.rho = mean_range + base.gnss_sigma * normal(noise_rng);
      m.sigma = base.gnss_sigma > 0.0 ? base.gnss_sigma : 1.0;
      epoch.pseudoranges.push_back(m);
      if (faulty) record.faults.push_back({t, m.sat_id, mean_range - true_range});
    }
    record.epochs.push_back(std::move(epoch));
  }
  return record;
}

}  // namespace gmmpf
