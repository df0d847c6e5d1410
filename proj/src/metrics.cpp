#include "gmmpf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gmmpf/types.hpp"

namespace gmmpf {

std::vector<double> horizontal_errors(std::span<const Eigen::Vector2d> estimates,
                                      std::span<const Eigen::Vector2d> truths) {
  if (estimates.size() != truths.size()) throw InvariantError("estimate/truth length mismatch");
  std::vector<double> e(estimates.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = (estimates[i] - truths[i]).norm();
  return e;
}

double rmse(std::span<const Eigen::Vector2d> estimates, std::span<const Eigen::Vector2d> truths) {
  const auto e = horizontal_errors(estimates, truths);
  if (e.empty()) throw InvariantError("rmse of an empty sequence");
  double s = 0.0;
  for (double x : e) s += x * x;
  return std::sqrt(s / static_cast<double>(e.size()));
}

namespace {

void split(const RunRecord& run, std::vector<Eigen::Vector2d>& est, std::vector<Eigen::Vector2d>& tru) {
  est.clear();
  tru.clear();
  for (const auto& e : run.epochs) {
    est.push_back(e.estimate);
    tru.push_back(e.truth);
  }
}

}  // namespace

double rmse(const RunRecord& run) {
  std::vector<Eigen::Vector2d> est, tru;
  split(run, est, tru);
  return rmse(est, tru);
}

double pct_over(std::span<const Eigen::Vector2d> estimates, std::span<const Eigen::Vector2d> truths,
                double limit) {
  const auto e = horizontal_errors(estimates, truths);
  if (e.empty()) throw InvariantError("pct_over of an empty sequence");
  const auto over = std::count_if(e.begin(), e.end(), [limit](double x) { return x > limit; });
  return 100.0 * static_cast<double>(over) / static_cast<double>(e.size());
}

double pct_over(const RunRecord& run, double limit) {
  std::vector<Eigen::Vector2d> est, tru;
  split(run, est, tru);
  return pct_over(est, tru, limit);
}

AlarmRates pfa_pir(std::span<const bool> available, std::span<const bool> hazard) {
  if (available.size() != hazard.size() || available.empty()) {
    throw InvariantError("flag sequences must be equal-length and nonempty");
  }
  std::size_t fa = 0, ir = 0;
  for (std::size_t i = 0; i < available.size(); ++i) {
    if (!available[i] && !hazard[i]) ++fa;
    if (available[i] && hazard[i]) ++ir;
  }
  const auto t = static_cast<double>(available.size());
  return {static_cast<double>(fa) / t, static_cast<double>(ir) / t};
}

AlarmRates pfa_pir(const std::vector<RunRecord>& runs) {
  std::size_t total = 0, fa = 0, ir = 0;
  for (const auto& run : runs) {
    for (const auto& e : run.epochs) {
      ++total;
      if (!e.available && !e.hazard) ++fa;
      if (e.available && e.hazard) ++ir;
    }
  }
  if (total == 0) throw InvariantError("no epochs to score");
  const auto t = static_cast<double>(total);
  return {static_cast<double>(fa) / t, static_cast<double>(ir) / t};
}

std::vector<double> default_pmir_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

std::vector<double> default_ra_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 30; ++i) g.push_back(static_cast<double>(i));
  return g;
}

std::vector<SweepPoint> threshold_sweep(const std::vector<RunRecord>& runs,
                                        std::span<const double> pmir_grid,
                                        std::span<const double> ra_grid) {
  std::size_t total = 0;
  for (const auto& run : runs) total += run.epochs.size();
  if (total == 0) throw InvariantError("threshold sweep needs at least one epoch");

  std::vector<SweepPoint> out;
  out.reserve(pmir_grid.size() * ra_grid.size());
  for (double pm : pmir_grid) {
    for (double ra : ra_grid) {
      std::size_t fa = 0, ir = 0;
      for (const auto& run : runs) {
        for (const auto& e : run.epochs) {
          const bool available = e.p_mir <= pm && e.r_a <= ra;
          if (!available && !e.hazard) ++fa;
          if (available && e.hazard) ++ir;
        }
      }
      out.push_back({pm, ra, static_cast<double>(fa) / static_cast<double>(total),
                     static_cast<double>(ir) / static_cast<double>(total)});
    }
  }
  return out;
}

std::vector<SweepPoint> pareto_frontier(std::vector<SweepPoint> points) {
  std::sort(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) {
    if (a.p_fa != b.p_fa) return a.p_fa < b.p_fa;
    return a.p_ir < b.p_ir;
  });
  std::vector<SweepPoint> frontier;
  double best_ir = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (p.p_ir < best_ir) {
      frontier.push_back(p);
      best_ir = p.p_ir;
    }
  }
  return frontier;
}

double frontier_ir_at(std::span<const SweepPoint> frontier, double p_fa) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : frontier) {
    if (p.p_fa <= p_fa + 1e-12) best = std::min(best, p.p_ir);
  }
  return best;
}

DominanceResult frontier_dominance(std::span<const SweepPoint> ours,
                                   std::span<const SweepPoint> theirs) {
  DominanceResult result;
  if (ours.empty() || theirs.empty()) return result;
  const double start = std::max(ours.front().p_fa, theirs.front().p_fa);
  std::set<double> levels;
  for (const auto& p : ours) levels.insert(p.p_fa);
  for (const auto& p : theirs) levels.insert(p.p_fa);
  for (double fa : levels) {
    if (fa < start) continue;
    ++result.compared;
    if (frontier_ir_at(ours, fa) <= frontier_ir_at(theirs, fa) + 1e-12) ++result.not_worse;
  }
  return result;
}

MeanAndError mean_and_standard_error(std::span<const double> values) {
  MeanAndError out;
  if (values.empty()) return out;
  const auto n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

}  // namespace gmmpf
