#include "gmmpf/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gmmpf/measurement_model.hpp"

namespace gmmpf {

namespace fs = std::filesystem;

CsvError::CsvError(const std::string& file, std::size_t line, const std::string& what)
    : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

// CSV plumbing -----------------------------------------------------------------

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + file.string() + "' for writing");
  return out;
}

struct CsvTable {
  std::string file;
  std::vector<std::vector<std::string>> rows;  // excludes header
  std::size_t first_line = 2;

  std::size_t line_of(std::size_t row) const { return first_line + row; }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

CsvTable read_csv(const fs::path& file, const std::string& header) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open '" + file.string() + "'");
  CsvTable table;
  table.file = file.string();
  std::string line;
  if (!std::getline(in, line)) throw CsvError(table.file, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw CsvError(table.file, 1, "expected header '" + header + "', found '" + line + "'");
  }
  const std::size_t columns = split_csv_line(header).size();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") {
      throw CsvError(table.file, lineno, "empty row");
    }
    auto fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw CsvError(table.file, lineno,
                     "expected " + std::to_string(columns) + " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

double parse_number(const CsvTable& t, std::size_t row, const std::string& field, const char* column) {
  if (field == "nan") return std::nan("");
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (field.empty() || end != begin + field.size() || errno == ERANGE) {
    throw CsvError(t.file, t.line_of(row), std::string("invalid number in column '") + column + "'");
  }
  return v;
}

std::optional<double> parse_optional(const CsvTable& t, std::size_t row, const std::string& field,
                                     const char* column) {
  if (field.empty()) return std::nullopt;
  return parse_number(t, row, field, column);
}

int parse_int(const CsvTable& t, std::size_t row, const std::string& field, const char* column) {
  const double v = parse_number(t, row, field, column);
  if (v != std::floor(v)) {
    throw CsvError(t.file, t.line_of(row), std::string("expected integer in column '") + column + "'");
  }
  return static_cast<int>(v);
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

// Shared readers ------------------------------------------------------------------

std::vector<EpochMeasurements> read_epochs(const fs::path& file) {
  const auto t = read_csv(file, kEpochsHeader);
  std::vector<EpochMeasurements> epochs;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    const double time = parse_number(t, r, f[0], "t");
    if (!epochs.empty() && time < epochs.back().time) {
      throw CsvError(t.file, t.line_of(r), "timestamps are not monotone");
    }
    if (epochs.empty() || time != epochs.back().time) {
      epochs.emplace_back();
      epochs.back().time = time;
    }
    PseudorangeMeasurement m;
    m.sat_id = parse_int(t, r, f[1], "sat_id");
    m.satellite.position = {parse_number(t, r, f[2], "sat_x"), parse_number(t, r, f[3], "sat_y"),
                            parse_number(t, r, f[4], "sat_z")};
    m.satellite.velocity = {parse_number(t, r, f[5], "sat_vx"), parse_number(t, r, f[6], "sat_vy"),
                            parse_number(t, r, f[7], "sat_vz")};
    m.rho = parse_number(t, r, f[8], "rho");
    m.sigma = parse_number(t, r, f[9], "sigma");
    try {
      m.validate();
    } catch (const InvariantError& e) {
      throw CsvError(t.file, t.line_of(r), e.what());
    }
    epochs.back().pseudoranges.push_back(m);
  }
  return epochs;
}

std::vector<TruthSample> read_truth(const fs::path& file) {
  const auto t = read_csv(file, kTruthHeader);
  std::vector<TruthSample> truth;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    TruthSample s;
    s.time = parse_number(t, r, f[0], "t");
    if (!truth.empty() && s.time <= truth.back().time) {
      throw CsvError(t.file, t.line_of(r), "timestamps are not strictly increasing");
    }
    s.state.px = parse_number(t, r, f[1], "px");
    s.state.py = parse_number(t, r, f[2], "py");
    s.state.heading = parse_optional(t, r, f[3], "heading");
    truth.push_back(s);
  }
  return truth;
}

struct OdometryRow {
  double time;
  double speed;
  std::optional<double> yaw_rate;
};

std::vector<OdometryRow> read_odometry(const fs::path& file) {
  const auto t = read_csv(file, kOdometryHeader);
  std::vector<OdometryRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    OdometryRow o{parse_number(t, r, f[0], "t"), parse_number(t, r, f[1], "speed"),
                  parse_optional(t, r, f[2], "yaw_rate")};
    if (!rows.empty() && o.time <= rows.back().time) {
      throw CsvError(t.file, t.line_of(r), "timestamps are not strictly increasing");
    }
    rows.push_back(o);
  }
  return rows;
}

StateVector interpolate_truth(const std::vector<TruthSample>& truth, double time) {
  if (truth.empty()) throw InvariantError("no truth samples");
  if (time <= truth.front().time) return truth.front().state;
  if (time >= truth.back().time) return truth.back().state;
  const auto it = std::lower_bound(truth.begin(), truth.end(), time,
                                   [](const TruthSample& s, double t) { return s.time < t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double u = (time - a.time) / (b.time - a.time);
  StateVector s;
  s.px = a.state.px + u * (b.state.px - a.state.px);
  s.py = a.state.py + u * (b.state.py - a.state.py);
  if (a.state.heading && b.state.heading) {
    const double d = wrap_angle(*b.state.heading - *a.state.heading);
    s.heading = wrap_angle(*a.state.heading + u * d);
  }
  return s;
}

}  // namespace

// Scenario files -----------------------------------------------------------------

void write_scenario(const ScenarioRecord& scenario, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());

  auto epochs = open_out(dir / "epochs.csv");
  epochs << kEpochsHeader << '\n';
  for (const auto& e : scenario.epochs) {
    for (const auto& m : e.pseudoranges) {
      epochs << format_double(e.time) << ',' << m.sat_id << ',' << format_double(m.satellite.position.x())
             << ',' << format_double(m.satellite.position.y()) << ','
             << format_double(m.satellite.position.z()) << ',' << format_double(m.satellite.velocity.x())
             << ',' << format_double(m.satellite.velocity.y()) << ','
             << format_double(m.satellite.velocity.z()) << ',' << format_double(m.rho) << ','
             << format_double(m.sigma) << '\n';
    }
  }

  auto truth = open_out(dir / "truth.csv");
  truth << kTruthHeader << '\n';
  for (const auto& s : scenario.truth) {
    truth << format_double(s.time) << ',' << format_double(s.state.px) << ',' << format_double(s.state.py)
          << ',' << opt(s.state.heading) << '\n';
  }

  if (scenario.has_odometry) {
    auto odo = open_out(dir / "odometry.csv");
    odo << kOdometryHeader << '\n';
    for (const auto& e : scenario.epochs) {
      if (!e.odometry) continue;
      odo << format_double(e.time) << ',' << format_double(e.odometry->speed) << ','
          << opt(e.odometry->yaw_rate) << '\n';
    }
  }

  auto faults = open_out(dir / "faults.csv");
  faults << kFaultsHeader << '\n';
  for (const auto& f : scenario.faults) {
    faults << format_double(f.time) << ',' << f.sat_id << ',' << format_double(f.bias) << '\n';
  }
  if (!epochs || !truth || !faults) throw Error("failed writing scenario to '" + dir.string() + "'");
}

ScenarioRecord load_scenario(const fs::path& dir) {
  ScenarioRecord scenario;
  scenario.epochs = read_epochs(dir / "epochs.csv");
  scenario.truth = read_truth(dir / "truth.csv");
  if (scenario.truth.size() != scenario.epochs.size() + 1) {
    throw Error("truth.csv must have exactly one more row than there are epochs");
  }
  for (std::size_t j = 0; j < scenario.epochs.size(); ++j) {
    if (scenario.truth[j + 1].time != scenario.epochs[j].time) {
      throw CsvError((dir / "truth.csv").string(), j + 3, "truth time does not match epoch time");
    }
  }

  scenario.has_odometry = fs::exists(dir / "odometry.csv");
  if (scenario.has_odometry) {
    const auto rows = read_odometry(dir / "odometry.csv");
    std::map<double, const OdometryRow*> by_time;
    for (const auto& r : rows) by_time[r.time] = &r;
    for (std::size_t j = 0; j < scenario.epochs.size(); ++j) {
      auto& e = scenario.epochs[j];
      const auto it = by_time.find(e.time);
      if (it == by_time.end()) continue;
      Odometry o{it->second->speed, it->second->yaw_rate, std::nullopt};
      // Simulation runs assume the heading is known.
      if (!o.yaw_rate) o.heading = scenario.truth[j + 1].state.heading;
      e.odometry = o;
    }
  }

  const fs::path faults_file = dir / "faults.csv";
  if (fs::exists(faults_file)) {
    const auto t = read_csv(faults_file, kFaultsHeader);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto& f = t.rows[r];
      scenario.faults.push_back({parse_number(t, r, f[0], "t"), parse_int(t, r, f[1], "sat_id"),
                                 parse_number(t, r, f[2], "bias")});
    }
  }
  return scenario;
}

// Replay ---------------------------------------------------------------------------

ScenarioRecord load_replay_csv(const ReplayPaths& paths, const ReplayOptions& options) {
  ScenarioRecord scenario;
  auto epochs = read_epochs(paths.epochs);
  if (epochs.empty()) throw Error("replay epochs file has no rows");
  const auto odometry = read_odometry(paths.odometry);
  std::vector<TruthSample> truth;
  if (paths.truth) truth = read_truth(*paths.truth);

  // Average the odometry over (t_prev, t]; fall back to the latest earlier row.
  double prev_time = -std::numeric_limits<double>::infinity();
  for (auto& e : epochs) {
    double speed = 0.0, yaw = 0.0;
    std::size_t n = 0, n_yaw = 0;
    const OdometryRow* latest = nullptr;
    for (const auto& o : odometry) {
      if (o.time <= e.time) latest = &o;
      if (o.time > prev_time && o.time <= e.time) {
        speed += o.speed;
        ++n;
        if (o.yaw_rate) {
          yaw += *o.yaw_rate;
          ++n_yaw;
        }
      }
    }
    if (n > 0) {
      e.odometry = Odometry{speed / static_cast<double>(n),
                            n_yaw ? std::optional<double>(yaw / static_cast<double>(n_yaw)) : std::nullopt,
                            std::nullopt};
    } else if (latest) {
      e.odometry = Odometry{latest->speed, latest->yaw_rate, std::nullopt};
    }
    if (e.odometry && !e.odometry->yaw_rate) e.odometry->yaw_rate = 0.0;
    prev_time = e.time;
  }

  if (options.remove_initial_residuals) {
    if (truth.empty()) throw Error("initial-residual removal needs a truth file");
    std::map<int, double> offset;
    for (const auto& e : epochs) {
      const StateVector at = interpolate_truth(truth, e.time);
      for (const auto& m : e.pseudoranges) {
        if (!offset.contains(m.sat_id)) {
          offset[m.sat_id] = m.rho - expected_pseudorange(at, m.satellite);
        }
      }
    }
    for (auto& e : epochs) {
      for (auto& m : e.pseudoranges) m.rho -= offset[m.sat_id];
    }
  }

  // The filter starts one epoch interval before the first measurement, at
  // the truth of the first epoch.
  const double lead = epochs.size() > 1 ? epochs[1].time - epochs[0].time : 1.0;
  std::vector<double> times{epochs.front().time - lead};
  for (const auto& e : epochs) times.push_back(e.time);
  for (std::size_t j = 0; j < times.size(); ++j) {
    TruthSample s;
    s.time = times[j];
    const double at = j == 0 ? epochs.front().time : times[j];
    if (!truth.empty()) s.state = interpolate_truth(truth, at);
    if (!s.state.heading) s.state.heading = 0.0;
    s.state.clock_bias = 0.0;
    scenario.truth.push_back(s);
  }
  scenario.epochs = std::move(epochs);
  scenario.has_odometry = true;
  return scenario;
}

// Results --------------------------------------------------------------------------

void write_results(const RunRecord& run, const fs::path& file) {
  auto out = open_out(file);
  out << kResultsHeader << '\n';
  for (const auto& e : run.epochs) {
    out << format_double(e.time) << ',' << format_double(e.estimate.x()) << ','
        << format_double(e.estimate.y()) << ',' << format_double(e.error()) << ','
        << format_double(e.p_mir) << ',' << format_double(e.r_a) << ',' << (e.available ? 1 : 0) << ','
        << (e.hazard ? 1 : 0) << '\n';
  }
  if (!out) throw Error("failed writing '" + file.string() + "'");
}

RunRecord load_results(const fs::path& file, double alarm_limit) {
  const auto t = read_csv(file, kResultsHeader);
  RunRecord run;
  run.alarm_limit = alarm_limit;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    EpochRecord e;
    e.time = parse_number(t, r, f[0], "t");
    e.estimate = {parse_number(t, r, f[1], "est_px"), parse_number(t, r, f[2], "est_py")};
    const double err = parse_number(t, r, f[3], "err");
    // Truth is not stored; place it along x so that error() reproduces err.
    e.truth = e.estimate + Eigen::Vector2d(err, 0.0);
    e.p_mir = parse_number(t, r, f[4], "p_mir");
    e.r_a = parse_number(t, r, f[5], "r_a");
    e.available = parse_int(t, r, f[6], "available") != 0;
    e.hazard = parse_int(t, r, f[7], "hazard") != 0;
    run.epochs.push_back(e);
  }
  return run;
}

void write_plotdata(const RunRecord& run, const fs::path& file) {
  auto out = open_out(file);
  out << "t,error,p_mir\n";
  for (const auto& e : run.epochs) {
    out << format_double(e.time) << ',' << format_double(e.error()) << ',' << format_double(e.p_mir) << '\n';
  }
}

void write_summary(const ExperimentTable& table, const fs::path& file) {
  auto out = open_out(file);
  out << "filter,runs,failures,rmse_mean,rmse_se,pct_over_15_mean,pct_over_15_se,p_fa,p_ir\n";
  for (const auto& row : table.rows) {
    out << to_string(row.filter) << ',' << row.runs << ',' << row.failures << ','
        << format_double(row.rmse.mean) << ',' << format_double(row.rmse.standard_error) << ','
        << format_double(row.pct_over_15.mean) << ',' << format_double(row.pct_over_15.standard_error)
        << ',' << format_double(row.alarms.p_fa) << ',' << format_double(row.alarms.p_ir) << '\n';
  }
}

void write_pareto(const std::vector<ParetoCurve>& curves, const fs::path& file) {
  auto out = open_out(file);
  out << "monitor,particles,alarm_limit,pmir_threshold,ra_threshold,p_fa,p_ir\n";
  for (const auto& c : curves) {
    for (const auto& p : c.frontier) {
      out << c.monitor << ',' << c.particles << ',' << format_double(c.alarm_limit) << ','
          << format_double(p.pmir_threshold) << ',' << format_double(p.ra_threshold) << ','
          << format_double(p.p_fa) << ',' << format_double(p.p_ir) << '\n';
    }
  }
}

// Config ---------------------------------------------------------------------------

namespace {

using boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario",
       {"kind", "num_satellites", "gnss_sigma", "bias_min", "bias_max", "max_faults", "fault_change_prob",
        "vehicle_speed", "odometry_sigma", "duration", "rate", "shape", "fault_start", "fault_end",
        "max_fault_fraction", "offset_min", "offset_max", "hold_fault"}},
      {"filter",
       {"num_particles", "propagation_sigma", "measurement_sigma", "init_sigma", "em_iterations",
        "em_tolerance", "include_prior_in_weighting", "heading_propagation_sigma",
        "clock_propagation_sigma"}},
      {"kf_raim", {"propagation_sigma", "measurement_sigma", "init_sigma", "p_fa_global", "p_fa_local"}},
      {"jpf",
       {"num_particles", "propagation_sigma", "measurement_sigma", "init_sigma", "max_faults",
        "fault_change_prob", "flat_width", "flat_window"}},
      {"integrity",
       {"enabled", "alarm_limit", "pmir_threshold", "accuracy_threshold", "alpha", "cubature_order"}},
      {"experiment", {"filters", "seeds", "output_dir", "threads"}},
  };
  return keys;
}

template <typename T>
void read_key(const ptree& tree, const std::string& path, T& target) {
  const auto node = tree.get_optional<std::string>(path);
  if (!node) return;
  std::istringstream in(*node);
  T value{};
  if constexpr (std::is_same_v<T, bool>) {
    std::string s;
    in >> s;
    if (s == "true" || s == "1" || s == "yes") {
      value = true;
    } else if (s == "false" || s == "0" || s == "no") {
      value = false;
    } else {
      throw ConfigError("invalid boolean for '" + path + "': " + *node);
    }
  } else {
    in >> value;
    if (!in || !(in >> std::ws).eof()) throw ConfigError("invalid value for '" + path + "': " + *node);
  }
  target = value;
}

void read_optional_key(const ptree& tree, const std::string& path, std::optional<double>& target) {
  if (!tree.get_optional<std::string>(path)) return;
  double v = 0.0;
  read_key(tree, path, v);
  target = v;
}

void read_scenario(const ptree& tree, ScenarioConfig& c) {
  read_key(tree, "scenario.num_satellites", c.num_satellites);
  read_key(tree, "scenario.gnss_sigma", c.gnss_sigma);
  read_key(tree, "scenario.bias_min", c.bias_min);
  read_key(tree, "scenario.bias_max", c.bias_max);
  read_key(tree, "scenario.max_faults", c.max_faults);
  read_key(tree, "scenario.fault_change_prob", c.fault_change_prob);
  read_key(tree, "scenario.vehicle_speed", c.vehicle_speed);
  read_key(tree, "scenario.odometry_sigma", c.odometry_sigma);
  read_key(tree, "scenario.duration", c.duration);
  read_key(tree, "scenario.rate", c.rate);
  std::string shape;
  read_key(tree, "scenario.shape", shape);
  if (shape == "square") {
    c.shape = TrajectoryShape::kSquare;
  } else if (!shape.empty() && shape != "random") {
    throw ConfigError("scenario.shape must be 'random' or 'square'");
  }
}

}  // namespace

ExperimentConfig load_experiment_config(const fs::path& file) {
  if (!fs::exists(file)) throw ConfigError("config file '" + file.string() + "' does not exist");
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(file.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }

  ExperimentConfig c;
  std::string kind;
  read_key(tree, "scenario.kind", kind);
  if (kind == "integrity") {
    c.scenario_kind = ScenarioKind::kIntegrity;
    read_scenario(tree, c.integrity_scenario.base);
    auto& is = c.integrity_scenario;
    read_key(tree, "scenario.fault_start", is.fault_start);
    read_key(tree, "scenario.fault_end", is.fault_end);
    read_key(tree, "scenario.max_fault_fraction", is.max_fault_fraction);
    read_key(tree, "scenario.offset_min", is.offset_min);
    read_key(tree, "scenario.offset_max", is.offset_max);
    read_key(tree, "scenario.hold_fault", is.hold_fault);
    // Without odometry the filters need a wider propagation model.
    c.proposed.propagation_sigma = 20.0;
    c.kf_raim.propagation_sigma = 20.0;
    c.jpf.propagation_sigma = 20.0;
    c.compute_integrity = true;
  } else if (kind.empty() || kind == "localization") {
    read_scenario(tree, c.scenario);
  } else {
    throw ConfigError("scenario.kind must be 'localization' or 'integrity'");
  }

  auto& f = c.proposed;
  read_key(tree, "filter.num_particles", f.num_particles);
  read_key(tree, "filter.propagation_sigma", f.propagation_sigma);
  read_optional_key(tree, "filter.measurement_sigma", f.measurement_sigma);
  read_key(tree, "filter.init_sigma", f.init_sigma);
  read_key(tree, "filter.em_iterations", f.em_iterations);
  read_key(tree, "filter.em_tolerance", f.em_tolerance);
  read_key(tree, "filter.include_prior_in_weighting", f.include_prior_in_weighting);
  read_key(tree, "filter.heading_propagation_sigma", f.heading_propagation_sigma);
  read_key(tree, "filter.clock_propagation_sigma", f.clock_propagation_sigma);

  auto& k = c.kf_raim;
  read_key(tree, "kf_raim.propagation_sigma", k.propagation_sigma);
  read_optional_key(tree, "kf_raim.measurement_sigma", k.measurement_sigma);
  read_key(tree, "kf_raim.init_sigma", k.init_sigma);
  read_key(tree, "kf_raim.p_fa_global", k.p_fa_global);
  read_key(tree, "kf_raim.p_fa_local", k.p_fa_local);

  auto& j = c.jpf;
  j.num_particles = f.num_particles;
  read_key(tree, "jpf.num_particles", j.num_particles);
  read_key(tree, "jpf.propagation_sigma", j.propagation_sigma);
  read_optional_key(tree, "jpf.measurement_sigma", j.measurement_sigma);
  read_key(tree, "jpf.init_sigma", j.init_sigma);
  read_key(tree, "jpf.max_faults", j.max_faults);
  read_key(tree, "jpf.fault_change_prob", j.fault_change_prob);
  read_key(tree, "jpf.flat_width", j.flat_width);
  read_key(tree, "jpf.flat_window", j.flat_window);

  auto& i = c.integrity;
  read_key(tree, "integrity.enabled", c.compute_integrity);
  read_key(tree, "integrity.alarm_limit", i.alarm_limit);
  read_key(tree, "integrity.pmir_threshold", i.pmir_threshold);
  read_key(tree, "integrity.accuracy_threshold", i.accuracy_threshold);
  read_key(tree, "integrity.alpha", i.alpha);
  read_key(tree, "integrity.cubature_order", i.cubature_order);

  std::string filters;
  read_key(tree, "experiment.filters", filters);
  if (!filters.empty()) {
    c.filters.clear();
    std::stringstream ss(filters);
    std::string name;
    while (std::getline(ss, name, ',')) {
      name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
      try {
        c.filters.push_back(parse_filter_kind(name));
      } catch (const InvariantError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  std::string seeds;
  read_key(tree, "experiment.seeds", seeds);
  if (!seeds.empty()) {
    try {
      c.seeds = parse_seed_list(seeds);
    } catch (const InvariantError& e) {
      throw ConfigError(e.what());
    }
  }
  read_key(tree, "experiment.output_dir", c.output_dir);
  read_key(tree, "experiment.threads", c.threads);

  try {
    (c.scenario_kind == ScenarioKind::kIntegrity ? c.integrity_scenario.base : c.scenario).validate();
    c.proposed.validate();
    c.integrity.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

void apply_environment_overrides(ExperimentConfig& config) {
  if (const char* seed = std::getenv("GMMPF_SEED"); seed && *seed) {
    try {
      config.seeds = parse_seed_list(seed);
    } catch (const InvariantError& e) {
      throw ConfigError(std::string("GMMPF_SEED: ") + e.what());
    }
  }
  if (const char* dir = std::getenv("GMMPF_OUTPUT_DIR"); dir && *dir) config.output_dir = dir;
}

}  // namespace gmmpf
