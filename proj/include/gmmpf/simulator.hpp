#pragma once

#include <cstdint>
#include <vector>

#include "gmmpf/motion.hpp"
#include "gmmpf/types.hpp"

namespace gmmpf {

enum class TrajectoryShape { kRandomHeading, kSquare };

struct ScenarioConfig {
  int num_satellites = 7;
  double gnss_sigma = 5.0;     // [m]
  double bias_min = 100.0;     // [m]
  double bias_max = 100.0;     // [m]
  int max_faults = 3;
  double fault_change_prob = 0.2;
  double vehicle_speed = 10.0;   // [m/s]
  double odometry_sigma = 5.0;   // [m/s]
  double duration = 400.0;       // [s]
  double rate = 1.0;             // [Hz]
  TrajectoryShape shape = TrajectoryShape::kRandomHeading;
  double heading_hold_min = 20.0;  // [s]
  double heading_hold_max = 60.0;  // [s]
  double square_side = 1000.0;     // [m]
  double satellite_height = 2e7;   // [m]
  double satellite_speed = 1000.0; // [m/s]
  double satellite_min_horizontal = 1e7;  // [m]
  double satellite_max_horizontal = 3e7;  // [m]
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct TruthSample {
  double time = 0.0;
  StateVector state;  // heading = direction of travel over the preceding step
};

/// Random-heading walk (heading redrawn every 20-60 s) or the fixed square
/// path, sampled at `rate` from t = 0 to `duration`.
std::vector<TruthSample> generate_trajectory(const ScenarioConfig& config, Rng& rng);

/// Satellites at a fixed height moving with constant horizontal velocity.
class Constellation {
 public:
  Constellation(const ScenarioConfig& config, Rng& rng);

  std::vector<SatelliteState> at(double time) const;
  const std::vector<double>& azimuths() const { return azimuths_; }
  double min_spacing() const { return min_spacing_; }

 private:
  std::vector<SatelliteState> initial_;
  std::vector<double> azimuths_;
  double min_spacing_ = 0.0;
};

std::vector<SatelliteState> constellation_at(double time, const Constellation& constellation);

struct FaultState {
  std::vector<int> faulty;     // sorted satellite indices
  std::vector<double> bias;    // per satellite, 0 when clean [m]

  bool is_faulty(int sat) const;
};

/// Fresh fault subset: size uniform in {0..max_faults}, members uniform,
/// biases uniform in [bias_min, bias_max].
FaultState draw_fault_state(const ScenarioConfig& config, Rng& rng);

/// With probability fault_change_prob redraws the fault state, else keeps it.
FaultState update_fault_state(const FaultState& fs, const ScenarioConfig& config, Rng& rng);

/// Pseudoranges from truth with per-satellite bias and Gaussian noise
/// (sqrt(2) sigma on faulty measurements), plus a noisy speed reading.
/// The recorded sigma is gnss_sigma for every measurement.
EpochMeasurements simulate_epoch(double time, const TruthSample& truth,
                                 const std::vector<SatelliteState>& sats, const FaultState& fs,
                                 const ScenarioConfig& config, Rng& rng);

struct FaultRecord {
  double time = 0.0;
  int sat_id = 0;
  double bias = 0.0;
};

/// Everything a run needs: truth at t = 0 plus one entry per epoch.
struct ScenarioRecord {
  std::vector<TruthSample> truth;  // truth[0] is the initial state at t = 0
  std::vector<EpochMeasurements> epochs;  // epochs[j] aligns with truth[j + 1]
  std::vector<FaultRecord> faults;
  bool has_odometry = true;
};

/// Localization scenario with randomly switching fault subsets.
ScenarioRecord simulate_scenario(const ScenarioConfig& config);

struct IntegrityScenarioConfig {
  ScenarioConfig base;  // num_satellites = 10, no odometry
  double fault_start = 125.0;  // [s]
  double fault_end = 175.0;    // [s]
  double max_fault_fraction = 0.6;
  double offset_min = 50.0;   // [m]
  double offset_max = 150.0;  // [m]
  /// Keep one faulted subset and offset for the whole window.
  bool hold_fault = true;

  IntegrityScenarioConfig();
};

/// Fault window during which up to 60% of the pseudoranges are ranges from
/// an offset position; clean otherwise. No odometry is produced.
ScenarioRecord simulate_integrity_scenario(const IntegrityScenarioConfig& config);

/// Named substreams of a run seed.
enum class Substream : std::uint64_t {
  kTrajectory = 1,
  kConstellation = 2,
  kFaults = 3,
  kNoise = 4,
};

}  // namespace gmmpf
