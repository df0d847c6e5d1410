#include "gmmpf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace gmmpf {

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::kProposed: return "proposed";
    case FilterKind::kKfRaim: return "kf-raim";
    case FilterKind::kJpf: return "j-pf";
  }
  return "unknown";
}

FilterKind parse_filter_kind(const std::string& name) {
  if (name == "proposed") return FilterKind::kProposed;
  if (name == "kf-raim") return FilterKind::kKfRaim;
  if (name == "j-pf") return FilterKind::kJpf;
  throw InvariantError("unknown filter '" + name + "' (expected proposed, kf-raim, j-pf)");
}

namespace {

EpochRecord make_epoch(double time, const StateVector& estimate, const StateVector& truth,
                       const IntegrityReport& report, double alarm_limit) {
  EpochRecord e;
  e.time = time;
  e.estimate = estimate.position();
  e.truth = truth.position();
  e.p_mir = report.p_mir;
  e.r_a = report.r_a;
  e.available = report.available;
  e.hazard = e.error() > alarm_limit;
  return e;
}

/// Initial fix: truth at t0, carrying heading/clock bias only in replay.
StateVector initial_fix(const ScenarioRecord& scenario, bool replay_state) {
  StateVector fix = scenario.truth.front().state;
  if (!replay_state) {
    fix.heading.reset();
    fix.clock_bias.reset();
  } else if (!fix.clock_bias) {
    fix.clock_bias = 0.0;
  }
  return fix;
}

bool is_replay_state(const ScenarioRecord& scenario) {
  for (const auto& e : scenario.epochs) {
    if (e.odometry && e.odometry->yaw_rate && !e.odometry->heading) return true;
  }
  return false;
}

}  // namespace

RunRecord run_filter(const ScenarioRecord& scenario, const RunOptions& options) {
  if (scenario.truth.size() != scenario.epochs.size() + 1) {
    throw InvariantError("scenario truth must have one more sample than epochs");
  }
  RunRecord run;
  run.alarm_limit = options.integrity.alarm_limit;
  const bool replay = is_replay_state(scenario);
  const StateVector fix = initial_fix(scenario, replay);
  const double t0 = scenario.truth.front().time;
  const double al = options.integrity.alarm_limit;

  switch (options.filter) {
    case FilterKind::kProposed: {
      FilterConfig cfg = options.proposed;
      cfg.rng_seed = options.seed;
      FaultRobustParticleFilter pf(cfg);
      pf.initialize(fix, t0);
      for (std::size_t j = 0; j < scenario.epochs.size(); ++j) {
        const auto& epoch = scenario.epochs[j];
        const auto step = pf.step(epoch);
        IntegrityReport report;
        if (options.compute_integrity && options.monitor == MonitorKind::kBayesian) {
          report = monitor_bayesian(step.posterior, step.estimate, options.integrity);
        } else if (options.compute_integrity && !step.prediction_only) {
          const EpochMeasurements& m =
              cfg.measurement_sigma ? with_sigma(epoch, *cfg.measurement_sigma) : epoch;
          report = monitor_integrity(step.gamma, m, step.propagated, step.posterior, step.estimate,
                                     options.integrity);
        }
        run.epochs.push_back(make_epoch(epoch.time, step.estimate, scenario.truth[j + 1].state, report, al));
      }
      break;
    }
    case FilterKind::kKfRaim: {
      KfRaimFilter kf(options.kf_raim);
      kf.initialize(fix, t0);
      for (std::size_t j = 0; j < scenario.epochs.size(); ++j) {
        const auto& epoch = scenario.epochs[j];
        const auto step = kf.step(epoch);
        IntegrityReport report;
        report.p_mir = std::numeric_limits<double>::quiet_NaN();
        if (options.compute_integrity) {
          const Eigen::Matrix2d c = step.state.covariance.topLeftCorner<2, 2>();
          report.r_a = std::max(0.0, accuracy(c, options.integrity.alpha).r_a);
          report.available = step.global_passed && report.r_a <= options.integrity.accuracy_threshold;
        }
        run.epochs.push_back(make_epoch(epoch.time, step.state.mean, scenario.truth[j + 1].state, report, al));
      }
      break;
    }
    case FilterKind::kJpf: {
      JpfConfig cfg = options.jpf;
      cfg.rng_seed = options.seed;
      JointParticleFilter jpf(cfg);
      jpf.initialize(fix, t0);
      for (std::size_t j = 0; j < scenario.epochs.size(); ++j) {
        const auto& epoch = scenario.epochs[j];
        const auto step = jpf.step(epoch);
        IntegrityReport report;
        if (options.compute_integrity) {
          report = monitor_bayesian(step.posterior, step.estimate, options.integrity);
        }
        run.epochs.push_back(make_epoch(epoch.time, step.estimate, scenario.truth[j + 1].state, report, al));
      }
      break;
    }
  }
  return run;
}

ScenarioRecord make_scenario(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.scenario_kind == ScenarioKind::kIntegrity) {
    IntegrityScenarioConfig c = config.integrity_scenario;
    c.base.rng_seed = seed;
    return simulate_integrity_scenario(c);
  }
  ScenarioConfig c = config.scenario;
  c.rng_seed = seed;
  return simulate_scenario(c);
}

ExperimentTable run_experiment(const ExperimentConfig& config) {
  const std::size_t n_seeds = config.seeds.size();
  const std::size_t n_filters = config.filters.size();
  const std::size_t jobs = n_seeds * n_filters;

  std::vector<RunRecord> records(jobs);
  std::vector<char> failed(jobs, 0);
  std::vector<ScenarioRecord> scenarios(n_seeds);

  auto pool = [&](std::size_t count, auto&& work) {
    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&]() {
        for (std::size_t i = next++; i < count; i = next++) work(i);
      });
    }
    for (auto& w : workers) w.join();
  };

  pool(n_seeds, [&](std::size_t s) { scenarios[s] = make_scenario(config, config.seeds[s]); });
  pool(jobs, [&](std::size_t job) {
    const std::size_t s = job / n_filters;
    const std::size_t f = job % n_filters;
    RunOptions opts;
    opts.filter = config.filters[f];
    opts.proposed = config.proposed;
    opts.kf_raim = config.kf_raim;
    opts.jpf = config.jpf;
    opts.integrity = config.integrity;
    opts.compute_integrity = config.compute_integrity;
    opts.monitor = config.monitor;
    opts.seed = config.seeds[s];
    try {
      records[job] = run_filter(scenarios[s], opts);
    } catch (const std::exception&) {
      failed[job] = 1;
    }
  });

  ExperimentTable table;
  for (std::size_t f = 0; f < n_filters; ++f) {
    ExperimentRow row;
    row.filter = config.filters[f];
    std::vector<double> rmses, pcts;
    std::vector<RunRecord> ok;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const std::size_t job = s * n_filters + f;
      ++row.runs;
      if (failed[job]) {
        ++row.failures;
        row.run_rmse.push_back(std::numeric_limits<double>::quiet_NaN());
        row.records.emplace_back();
        continue;
      }
      const double r = rmse(records[job]);
      rmses.push_back(r);
      pcts.push_back(pct_over(records[job], 15.0));
      row.run_rmse.push_back(r);
      ok.push_back(records[job]);
      row.records.push_back(std::move(records[job]));
    }
    row.rmse = mean_and_standard_error(rmses);
    row.pct_over_15 = mean_and_standard_error(pcts);
    if (!ok.empty()) row.alarms = pfa_pir(ok);
    table.rows.push_back(std::move(row));
  }
  return table;
}

IntegritySweep integrity_sweep(const ExperimentConfig& config, const std::vector<std::size_t>& particles,
                               const std::vector<double>& alarm_limits,
                               std::span<const double> pmir_grid, std::span<const double> ra_grid,
                               FilterKind bayesian_filter) {
  if (bayesian_filter == FilterKind::kKfRaim) throw InvariantError("Bayesian RAIM needs a particle filter");
  auto frontier_of = [&](const ExperimentConfig& c, ParetoCurve& curve) {
    const auto table = run_experiment(c);
    std::vector<RunRecord> ok;
    for (const auto& r : table.rows.front().records) {
      if (!r.epochs.empty()) ok.push_back(r);
    }
    if (ok.empty()) return;
    for (const auto& r : ok) curve.samples += r.epochs.size();
    curve.frontier = pareto_frontier(threshold_sweep(ok, pmir_grid, ra_grid));
  };

  IntegritySweep sweep;
  for (const std::size_t n : particles) {
    for (const double al : alarm_limits) {
      ExperimentConfig c = config;
      c.proposed.num_particles = n;
      c.jpf.num_particles = n;
      c.integrity.alarm_limit = al;
      c.compute_integrity = true;

      ParetoCurve ours{"proposed", n, al, {}, 0};
      c.filters = {FilterKind::kProposed};
      c.monitor = MonitorKind::kNative;
      frontier_of(c, ours);

      ParetoCurve theirs{"bayesian-raim", n, al, {}, 0};
      c.filters = {bayesian_filter};
      c.monitor = MonitorKind::kBayesian;
      frontier_of(c, theirs);

      sweep.dominance.push_back(frontier_dominance(ours.frontier, theirs.frontier));
      sweep.curves.push_back(std::move(ours));
      sweep.curves.push_back(std::move(theirs));
    }
  }
  return sweep;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dots = part.find("..");
    try {
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dots));
        const auto hi = std::stoull(part.substr(dots + 2));
        if (hi < lo) throw InvariantError("seed range '" + part + "' is reversed");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw InvariantError("invalid seed list '" + text + "'");
    }
  }
  if (seeds.empty()) throw InvariantError("empty seed list");
  return seeds;
}

}  // namespace gmmpf
