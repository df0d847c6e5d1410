#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gmmpf/experiment.hpp"
#include "gmmpf/metrics.hpp"
#include "gmmpf/simulator.hpp"

namespace gmmpf {

/// Malformed CSV input. `line` is the 1-based line number (header = 1).
class CsvError : public Error {
 public:
  CsvError(const std::string& file, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Column layouts.
inline constexpr const char* kEpochsHeader = "t,sat_id,sat_x,sat_y,sat_z,sat_vx,sat_vy,sat_vz,rho,sigma";
inline constexpr const char* kTruthHeader = "t,px,py,heading";
inline constexpr const char* kOdometryHeader = "t,speed,yaw_rate";
inline constexpr const char* kFaultsHeader = "t,sat_id,bias";
inline constexpr const char* kResultsHeader = "t,est_px,est_py,err,p_mir,r_a,available,hazard";

/// Shortest-safe round-trip text for a double (17 significant digits).
std::string format_double(double v);

/// Writes epochs.csv, truth.csv, faults.csv and (when the scenario has
/// odometry) odometry.csv into `dir`.
void write_scenario(const ScenarioRecord& scenario, const std::filesystem::path& dir);

/// Reads a scenario directory written by write_scenario. In simulation
/// scenarios the known heading from truth.csv is attached to the odometry.
ScenarioRecord load_scenario(const std::filesystem::path& dir);

struct ReplayPaths {
  std::filesystem::path epochs;
  std::filesystem::path odometry;
  std::optional<std::filesystem::path> truth;
};

struct ReplayOptions {
  /// Subtract each satellite's residual at its first epoch (w.r.t. truth)
  /// from all of its pseudoranges.
  bool remove_initial_residuals = false;
};

/// Real-data replay: pseudorange epochs merged with higher-rate odometry
/// (speed and yaw rate averaged over each epoch interval). Truth, when
/// given, is linearly interpolated at the epoch times. truth[0] is an
/// initialization sample one epoch interval before the first epoch, placed
/// at the first epoch's truth.
ScenarioRecord load_replay_csv(const ReplayPaths& paths, const ReplayOptions& options = {});

void write_results(const RunRecord& run, const std::filesystem::path& file);
RunRecord load_results(const std::filesystem::path& file, double alarm_limit);

/// t,error,p_mir columns for external plotting.
void write_plotdata(const RunRecord& run, const std::filesystem::path& file);

void write_summary(const ExperimentTable& table, const std::filesystem::path& file);

/// monitor,particles,alarm_limit,pmir_threshold,ra_threshold,p_fa,p_ir
void write_pareto(const std::vector<ParetoCurve>& curves, const std::filesystem::path& file);

/// Flat INI-style config: `[section]` headers with `key = value` lines.
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

/// Applies GMMPF_SEED and GMMPF_OUTPUT_DIR environment overrides.
void apply_environment_overrides(ExperimentConfig& config);

}  // namespace gmmpf
