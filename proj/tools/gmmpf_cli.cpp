// gmmpf command-line driver: simulate, run, replay, experiment, sweep-integrity.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gmmpf/experiment.hpp"
#include "gmmpf/io.hpp"

namespace fs = std::filesystem;
using namespace gmmpf;

namespace {

// Usage problems map to exit code 2; everything else that throws is a
// runtime failure (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::string config;
  std::string seeds;
  std::string out;
};

ExperimentConfig resolve_config(const Common& c) {
  ExperimentConfig config = c.config.empty() ? ExperimentConfig{} : load_experiment_config(c.config);
  apply_environment_overrides(config);
  try {
    if (!c.seeds.empty()) config.seeds = parse_seed_list(c.seeds);
  } catch (const InvariantError& e) {
    throw UsageError(e.what());
  }
  if (!c.out.empty()) config.output_dir = c.out;
  return config;
}

std::string seed_dir_name(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seed_%04llu", static_cast<unsigned long long>(seed));
  return buf;
}

FilterKind filter_arg(const std::string& name) {
  try {
    return parse_filter_kind(name);
  } catch (const InvariantError& e) {
    throw UsageError(e.what());
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::istringstream in(part);
    T v{};
    if (!(in >> v) || !(in >> std::ws).eof()) throw UsageError(std::string("invalid ") + what + " '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

RunOptions options_for(const ExperimentConfig& config, FilterKind filter, std::uint64_t seed) {
  RunOptions o;
  o.filter = filter;
  o.proposed = config.proposed;
  o.kf_raim = config.kf_raim;
  o.jpf = config.jpf;
  o.integrity = config.integrity;
  o.compute_integrity = config.compute_integrity;
  o.seed = seed;
  return o;
}

void write_run_outputs(const RunRecord& run, FilterKind filter, const fs::path& out, bool plotdata) {
  write_results(run, out / "results.csv");
  ExperimentTable table;
  ExperimentRow row;
  row.filter = filter;
  row.runs = 1;
  const double r = rmse(run);
  const double pct = pct_over(run, 15.0);
  row.rmse = mean_and_standard_error(std::vector<double>{r});
  row.pct_over_15 = mean_and_standard_error(std::vector<double>{pct});
  row.alarms = pfa_pir(std::vector<RunRecord>{run});
  table.rows.push_back(row);
  write_summary(table, out / "summary.csv");
  if (plotdata) write_plotdata(run, out / "plotdata.csv");
  std::cout << to_string(filter) << ": rmse " << r << " m, " << pct << "% over 15 m\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-robust GNSS particle filtering with integrity monitoring"};
  app.require_subcommand(1);

  // simulate
  Common sim;
  auto* simulate = app.add_subcommand("simulate", "Write seeded scenario directories");
  simulate->add_option("--config", sim.config, "Scenario config (INI)")->required();
  simulate->add_option("--seeds", sim.seeds, "Seed list, e.g. 0..49 or 1,5,9");
  simulate->add_option("--out", sim.out, "Output directory");

  // run
  Common run_args;
  std::string scenario_dir, filter_name = "proposed";
  std::uint64_t run_seed = 0;
  bool plotdata = false, no_integrity = false;
  auto* run = app.add_subcommand("run", "Run one filter over a scenario directory");
  run->add_option("--scenario", scenario_dir, "Scenario directory")->required();
  run->add_option("--filter", filter_name, "proposed | kf-raim | j-pf");
  run->add_option("--config", run_args.config, "Filter config (INI)");
  run->add_option("--seed", run_seed, "Filter rng seed");
  run->add_option("--out", run_args.out, "Output directory");
  run->add_flag("--plotdata", plotdata, "Also write plotdata.csv");
  run->add_flag("--no-integrity", no_integrity, "Skip the integrity monitor");

  // replay
  Common rep_args;
  std::string rep_epochs, rep_odometry, rep_truth, rep_filter = "proposed";
  std::uint64_t rep_seed = 0;
  bool remove_initial = false, rep_plotdata = false;
  auto* replay = app.add_subcommand("replay", "Run a filter over recorded pseudorange and odometry CSVs");
  replay->add_option("--epochs", rep_epochs, "Pseudorange epochs CSV")->required();
  replay->add_option("--odometry", rep_odometry, "Odometry CSV")->required();
  replay->add_option("--truth", rep_truth, "Reference trajectory CSV");
  replay->add_flag("--remove-initial-residuals", remove_initial, "Subtract first-epoch residuals");
  replay->add_option("--filter", rep_filter, "proposed | kf-raim | j-pf");
  replay->add_option("--config", rep_args.config, "Filter config (INI)");
  replay->add_option("--seed", rep_seed, "Filter rng seed");
  replay->add_option("--out", rep_args.out, "Output directory");
  replay->add_flag("--plotdata", rep_plotdata, "Also write plotdata.csv");

  // experiment
  Common exp_args;
  auto* experiment = app.add_subcommand("experiment", "Simulate and run every configured filter per seed");
  experiment->add_option("--config", exp_args.config, "Experiment config (INI)")->required();
  experiment->add_option("--seeds", exp_args.seeds, "Seed list");
  experiment->add_option("--out", exp_args.out, "Output directory");

  // sweep-integrity
  Common sw_args;
  std::string particles_arg = "100,500", limits_arg = "10,15", monitor_label = "proposed";
  std::vector<std::string> result_files;
  double results_al = 15.0;
  std::string bayesian_filter = "proposed";
  auto* sweep = app.add_subcommand("sweep-integrity", "Pareto frontiers of false alarm vs integrity risk");
  sweep->add_option("--config", sw_args.config, "Integrity scenario config (INI)");
  sweep->add_option("--seeds", sw_args.seeds, "Seed list");
  sweep->add_option("--out", sw_args.out, "Output directory");
  sweep->add_option("--particles", particles_arg, "Particle counts");
  sweep->add_option("--alarm-limits", limits_arg, "Alarm limits in metres");
  sweep->add_option("--bayesian-filter", bayesian_filter, "Posterior used by Bayesian RAIM: proposed | j-pf");
  sweep->add_option("--results", result_files, "Sweep existing results.csv files instead of simulating");
  sweep->add_option("--monitor", monitor_label, "Label for --results frontiers");
  sweep->add_option("--alarm-limit", results_al, "Alarm limit recorded for --results frontiers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      const auto config = resolve_config(sim);
      for (const auto seed : config.seeds) {
        const fs::path dir = fs::path(config.output_dir) / seed_dir_name(seed);
        write_scenario(make_scenario(config, seed), dir);
      }
      std::cout << "wrote " << config.seeds.size() << " scenario(s) to " << config.output_dir << "\n";
    } else if (*run) {
      auto config = resolve_config(run_args);
      if (no_integrity) config.compute_integrity = false;
      else if (run_args.config.empty()) config.compute_integrity = true;
      const FilterKind filter = filter_arg(filter_name);
      const auto scenario = load_scenario(scenario_dir);
      const auto record = run_filter(scenario, options_for(config, filter, run_seed));
      write_run_outputs(record, filter, config.output_dir, plotdata);
    } else if (*replay) {
      auto config = resolve_config(rep_args);
      if (rep_args.config.empty()) {
        // Larger state (heading, clock bias): more particles and EM passes.
        config.proposed.num_particles = 1000;
        config.proposed.em_iterations = 5;
        config.jpf.num_particles = 1000;
        config.compute_integrity = true;
      }
      const FilterKind filter = filter_arg(rep_filter);
      ReplayPaths paths{rep_epochs, rep_odometry, std::nullopt};
      if (!rep_truth.empty()) paths.truth = fs::path(rep_truth);
      const auto scenario = load_replay_csv(paths, ReplayOptions{remove_initial});
      const auto record = run_filter(scenario, options_for(config, filter, rep_seed));
      write_run_outputs(record, filter, config.output_dir, rep_plotdata);
    } else if (*experiment) {
      const auto config = resolve_config(exp_args);
      const auto table = run_experiment(config);
      write_summary(table, fs::path(config.output_dir) / "summary.csv");
      for (const auto& row : table.rows) {
        std::cout << to_string(row.filter) << ": rmse " << row.rmse.mean << " +- " << row.rmse.standard_error
                  << " m over " << row.runs - row.failures << "/" << row.runs << " runs\n";
      }
    } else if (*sweep) {
      const auto pmir_grid = default_pmir_grid();
      const auto ra_grid = default_ra_grid();
      std::vector<ParetoCurve> curves;
      ExperimentConfig config;
      if (!result_files.empty()) {
        config = resolve_config(sw_args);
        std::vector<RunRecord> runs;
        for (const auto& f : result_files) runs.push_back(load_results(f, results_al));
        ParetoCurve c{monitor_label, config.proposed.num_particles, results_al, {}, 0};
        for (const auto& r : runs) c.samples += r.epochs.size();
        c.frontier = pareto_frontier(threshold_sweep(runs, pmir_grid, ra_grid));
        curves.push_back(std::move(c));
      } else {
        if (sw_args.config.empty()) {
          config.scenario_kind = ScenarioKind::kIntegrity;
          config.proposed.propagation_sigma = 20.0;
          config.kf_raim.propagation_sigma = 20.0;
          config.jpf.propagation_sigma = 20.0;
        }
        const auto base = resolve_config(sw_args);
        if (!sw_args.config.empty()) config = base;
        else {
          config.seeds = base.seeds;
          config.output_dir = base.output_dir;
        }
        const auto particles = parse_list<std::size_t>(particles_arg, "particle list");
        const auto limits = parse_list<double>(limits_arg, "alarm limit list");
        const FilterKind source = filter_arg(bayesian_filter);
        if (source == FilterKind::kKfRaim) throw UsageError("--bayesian-filter must be proposed or j-pf");
        auto result = integrity_sweep(config, particles, limits, pmir_grid, ra_grid, source);
        for (std::size_t i = 0; i < result.dominance.size(); ++i) {
          const auto& c = result.curves[2 * i];
          std::cout << "N=" << c.particles << " AL=" << c.alarm_limit << ": proposed no worse at "
                    << result.dominance[i].not_worse << "/" << result.dominance[i].compared << " P(FA) levels\n";
        }
        curves = std::move(result.curves);
      }
      write_pareto(curves, fs::path(config.output_dir) / "pareto.csv");
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
