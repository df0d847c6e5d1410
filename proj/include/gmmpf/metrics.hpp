#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gmmpf {

/// One epoch of a filter run, with the raw integrity quantities kept so that
/// availability can be recomputed for any threshold pair.
struct EpochRecord {
  double time = 0.0;
  Eigen::Vector2d estimate = Eigen::Vector2d::Zero();
  Eigen::Vector2d truth = Eigen::Vector2d::Zero();
  double p_mir = 0.0;
  double r_a = 0.0;
  bool available = false;
  bool hazard = false;

  double error() const { return (estimate - truth).norm(); }
};

struct RunRecord {
  std::vector<EpochRecord> epochs;
  double alarm_limit = 15.0;
};

std::vector<double> horizontal_errors(std::span<const Eigen::Vector2d> estimates,
                                      std::span<const Eigen::Vector2d> truths);

/// sqrt(mean ||est - truth||^2). Throws InvariantError on length mismatch or
/// empty input.
double rmse(std::span<const Eigen::Vector2d> estimates, std::span<const Eigen::Vector2d> truths);
double rmse(const RunRecord& run);

/// 100 * fraction of epochs whose horizontal error exceeds `limit`.
double pct_over(std::span<const Eigen::Vector2d> estimates, std::span<const Eigen::Vector2d> truths,
                double limit = 15.0);
double pct_over(const RunRecord& run, double limit = 15.0);

struct AlarmRates {
  double p_fa = 0.0;  // unavailable while safe
  double p_ir = 0.0;  // available while hazardous
};

AlarmRates pfa_pir(std::span<const bool> available, std::span<const bool> hazard);
AlarmRates pfa_pir(const std::vector<RunRecord>& runs);

struct SweepPoint {
  double pmir_threshold = 0.0;
  double ra_threshold = 0.0;
  double p_fa = 0.0;
  double p_ir = 0.0;
};

/// {0, 0.01, ..., 1}
std::vector<double> default_pmir_grid();
/// {0, 1, ..., 30} m
std::vector<double> default_ra_grid();

/// Rates for every (P0_MIR, r0_A) pair, pooled over all runs.
std::vector<SweepPoint> threshold_sweep(const std::vector<RunRecord>& runs,
                                        std::span<const double> pmir_grid,
                                        std::span<const double> ra_grid);

/// Non-dominated points sorted by P(FA) ascending; P(IR) strictly decreases
/// along the result.
std::vector<SweepPoint> pareto_frontier(std::vector<SweepPoint> points);

/// Lowest P(IR) reachable on a frontier with P(FA) <= p_fa; +inf if none.
double frontier_ir_at(std::span<const SweepPoint> frontier, double p_fa);

struct DominanceResult {
  std::size_t compared = 0;
  std::size_t not_worse = 0;

  double fraction() const {
    return compared == 0 ? 0.0 : static_cast<double>(not_worse) / static_cast<double>(compared);
  }
};

/// Compares two frontiers at the P(FA) levels of both frontiers where both
/// are defined: counts levels where `ours` reaches a P(IR) no larger than
/// `theirs`.
DominanceResult frontier_dominance(std::span<const SweepPoint> ours,
                                   std::span<const SweepPoint> theirs);

struct MeanAndError {
  double mean = 0.0;
  double standard_error = 0.0;
};

MeanAndError mean_and_standard_error(std::span<const double> values);

}  // namespace gmmpf
