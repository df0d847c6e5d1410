#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmmpf/baselines.hpp"
#include "gmmpf/fault_robust_pf.hpp"
#include "gmmpf/integrity.hpp"
#include "gmmpf/metrics.hpp"
#include "gmmpf/simulator.hpp"

namespace gmmpf {

enum class FilterKind { kProposed, kKfRaim, kJpf };

std::string to_string(FilterKind kind);
/// Accepts "proposed", "kf-raim", "j-pf". Throws InvariantError otherwise.
FilterKind parse_filter_kind(const std::string& name);

enum class ScenarioKind { kLocalization, kIntegrity };

/// Integrity monitor attached to a run. kNative is the filter's own monitor
/// (GMM-based for the proposed filter, residual tests for KF-RAIM, posterior
/// tail mass for J-PF); kBayesian forces the posterior tail-mass monitor.
enum class MonitorKind { kNative, kBayesian };

struct RunOptions {
  FilterKind filter = FilterKind::kProposed;
  FilterConfig proposed;
  KfRaimConfig kf_raim;
  JpfConfig jpf;
  IntegrityConfig integrity;
  /// Evaluate the integrity monitor every epoch (costs O(N K^2)).
  bool compute_integrity = true;
  MonitorKind monitor = MonitorKind::kNative;
  std::uint64_t seed = 0;
};

/// Runs one filter over a scenario, initialized at the true initial position.
/// The seed in `options` overrides the per-filter rng seeds.
RunRecord run_filter(const ScenarioRecord& scenario, const RunOptions& options);

struct ExperimentConfig {
  ScenarioKind scenario_kind = ScenarioKind::kLocalization;
  ScenarioConfig scenario;
  IntegrityScenarioConfig integrity_scenario;
  std::vector<FilterKind> filters{FilterKind::kProposed, FilterKind::kKfRaim, FilterKind::kJpf};
  FilterConfig proposed;
  KfRaimConfig kf_raim;
  JpfConfig jpf;
  IntegrityConfig integrity;
  bool compute_integrity = false;
  MonitorKind monitor = MonitorKind::kNative;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "out";
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct ExperimentRow {
  FilterKind filter = FilterKind::kProposed;
  std::size_t runs = 0;
  std::size_t failures = 0;
  MeanAndError rmse;
  MeanAndError pct_over_15;
  AlarmRates alarms;
  std::vector<double> run_rmse;   // per seed, NaN for failed runs
  std::vector<RunRecord> records; // per seed (empty for failed runs)
};

struct ExperimentTable {
  std::vector<ExperimentRow> rows;  // one per filter, in config order
};

/// Scenario for one seed of an experiment.
ScenarioRecord make_scenario(const ExperimentConfig& config, std::uint64_t seed);

/// Every (seed x filter) pair; runs execute on a worker pool and results
/// are reduced in seed order, so the table depends only on the seed list.
ExperimentTable run_experiment(const ExperimentConfig& config);

struct ParetoCurve {
  std::string monitor;  // "proposed" or "bayesian-raim"
  std::size_t particles = 0;
  double alarm_limit = 0.0;
  std::vector<SweepPoint> frontier;
  std::size_t samples = 0;
};

struct IntegritySweep {
  std::vector<ParetoCurve> curves;  // proposed/bayesian pairs per (N, AL)
  /// Per (N, AL): how often the proposed frontier is no worse.
  std::vector<DominanceResult> dominance;
};

/// Runs the proposed monitor and Bayesian RAIM over the seeds of `config`
/// for every particle count and alarm limit, then sweeps the availability
/// thresholds into Pareto frontiers. Bayesian RAIM reads the posterior of
/// `bayesian_filter`: the proposed filter itself (same estimates and hazards
/// as the proposed monitor) or the J-PF.
IntegritySweep integrity_sweep(const ExperimentConfig& config, const std::vector<std::size_t>& particles,
                               const std::vector<double>& alarm_limits,
                               std::span<const double> pmir_grid, std::span<const double> ra_grid,
                               FilterKind bayesian_filter = FilterKind::kProposed);

/// Parses "0..49", "3", or "1,5,9".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace gmmpf
