// Command-line front end for the viscous-media dissipation library.
//
// Six subcommands (trajectory, classify, transform-check, spectrum, tunnel,
// sweep) driven by an optional JSON config file with strict key checking.
// Exit codes: 0 success, 1 config, 2 validation, 3 numerical, 4 I/O.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdq/sdq.hpp"

namespace {

using nlohmann::json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw config_error("config root must be a JSON object");
  return root;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) throw config_error("unknown key '" + item.key() + "' in " + where);
  }
}

double get_num(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw config_error(std::string("key '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

std::optional<double> get_opt_num(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj.at(key).is_number()) throw config_error(std::string("key '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

long long get_int(const json& obj, const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer()) throw config_error(std::string("key '") + key + "' must be an integer");
  return obj.at(key).get<long long>();
}

std::string get_str(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw config_error(std::string("key '") + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw config_error(std::string("key '") + key + "' must be a boolean");
  return obj.at(key).get<bool>();
}

/// Resolved output destination plus the summary channel. The artifact goes
/// to the output path when one is set, otherwise to stdout (in which case
/// the summary moves to stderr so the artifact stays machine-parseable).
struct Emitter {
  std::string path;
  std::string format;  // "csv" or "json"
  bool quiet = false;

  void write_text(const std::string& text) const { write_to(path, text); }

  void write_to(const std::string& dest, const std::string& text) const {
    if (dest.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(dest, std::ios::binary);
    if (!out) throw io_error("cannot open output file '" + dest + "'");
    out << text;
    out.flush();
    if (!out) throw io_error("failed writing output file '" + dest + "'");
  }

  void write_json(const json& j) const { write_text(j.dump(2) + "\n"); }

  void summary(const std::string& line) const {
    if (quiet) return;
    (path.empty() ? std::cerr : std::cout) << line << "\n";
  }
};

std::string wrote_suffix(const Emitter& em) { return em.path.empty() ? "" : ", wrote " + em.path; }

// ---- trajectory -------------------------------------------------------------

sdq::SDParams sd_params_from(const json& p) {
  sdq::SDParams params;
  params.m = get_num(p, "m", 1.0);
  params.eta = get_num(p, "eta", 1.0);
  params.q0 = get_num(p, "q0", 0.0);
  params.v0 = get_num(p, "v0", 1.0);
  return params;
}

json trajectory_json(const sdq::Trajectory& traj) {
  return json{{"dt", traj.dt}, {"t", traj.t}, {"q", traj.q}, {"v", traj.v}};
}

void run_trajectory(const json& p, const Emitter& em) {
  check_keys(p, {"m", "eta", "q0", "v0", "t_max", "dt", "form"}, "trajectory params");
  const sdq::SDParams params = sd_params_from(p);
  params.validate();
  const double t_max = get_num(p, "t_max", 10.0 * params.m / params.eta);
  const double dt = get_num(p, "dt", 1e-4 * params.m / params.eta);
  const std::string form = get_str(p, "form", "analytic");

  const std::vector<double> grid = sdq::make_time_grid(t_max, dt);
  sdq::Trajectory traj;
  if (form == "analytic")
    traj = sdq::analytic_trajectory(params, grid);
  else if (form == "original")
    traj = sdq::integrate_eom(params, sdq::EomForm::original, grid);
  else if (form == "transformed")
    traj = sdq::integrate_eom(params, sdq::EomForm::transformed, grid);
  else
    throw config_error("form must be analytic, original or transformed, got '" + form + "'");

  if (em.format == "csv")
    em.write_text(sdq::trajectory_csv(traj));
  else
    em.write_json(trajectory_json(traj));
  em.summary("trajectory: " + std::to_string(traj.size()) + " samples, form " + form +
             ", final q = " + sdq::format_double(traj.q.back()) +
             ", final v = " + sdq::format_double(traj.v.back()) + wrote_suffix(em));
}

// ---- classify ---------------------------------------------------------------

void run_classify(const json& p, const Emitter& em) {
  check_keys(p, {"m", "eta", "q0", "v0", "t_max", "dt", "vanish_epsilon", "slack", "input"},
             "classify params");
  const sdq::SDParams params = sd_params_from(p);
  sdq::ClassifyOptions opts;
  opts.vanish_epsilon = get_num(p, "vanish_epsilon", 1e-6);
  opts.slack = get_num(p, "slack", 0.0);

  sdq::Trajectory traj;
  if (p.contains("input")) {
    const std::string input = get_str(p, "input", "");
    std::ifstream in(input, std::ios::binary);
    if (!in) throw io_error("cannot open trajectory file '" + input + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    traj = sdq::parse_trajectory_csv(buf.str());
  } else {
    params.validate();
    const double t_max = get_num(p, "t_max", 20.0 * params.m / params.eta);
    const double dt = get_num(p, "dt", 1e-4 * params.m / params.eta);
    traj = sdq::analytic_trajectory(params, sdq::make_time_grid(t_max, dt));
  }

  const sdq::SDReport report = sdq::classify_sd(traj, params.m, opts);
  if (em.format == "csv") {
    std::string out =
        "kinetic_strictly_decreasing,trajectory_monotonic,kinetic_vanishes,work_nondecreasing,"
        "first_violation_index\n";
    const auto b = [](bool v) { return v ? "true" : "false"; };
    out += std::string(b(report.kinetic_strictly_decreasing)) + "," + b(report.trajectory_monotonic) + "," +
           b(report.kinetic_vanishes) + "," + b(report.work_nondecreasing) + "," +
           std::to_string(report.first_violation_index()) + "\n";
    em.write_text(out);
  } else {
    em.write_json(sdq::sd_report_json(report));
  }
  em.summary(std::string("classify: ") +
             (report.all_passed()
                  ? "strictly dissipative, all four checks passed"
                  : "not strictly dissipative, first violation at sample " +
                        std::to_string(report.first_violation_index())) +
             wrote_suffix(em));
}

// ---- transform-check --------------------------------------------------------

void run_transform_check(const json& p, const Emitter& em) {
  check_keys(p, {"m", "eta", "q0", "v0", "t_a", "t_b", "n", "tag", "refinements"},
             "transform-check params");
  json defaults = p;
  if (!defaults.contains("q0")) defaults["q0"] = 1.0;
  if (!defaults.contains("v0")) defaults["v0"] = -1.0;
  const sdq::SDParams params = sd_params_from(defaults);
  params.validate();
  const double t_a = get_num(p, "t_a", 0.0);
  const double t_b = get_num(p, "t_b", 10.0 * params.m / params.eta);
  const long long n = get_int(p, "n", 1000000);
  if (n < 2) throw sdq::validation_error("transform-check: n must be >= 2");
  const long long refinements = get_int(p, "refinements", 1);
  if (refinements < 1 || refinements > 16) throw config_error("refinements must be in [1, 16]");
  const std::string tag_name = get_str(p, "tag", "midpoint");
  sdq::RiemannTag tag;
  if (tag_name == "left")
    tag = sdq::RiemannTag::left;
  else if (tag_name == "right")
    tag = sdq::RiemannTag::right;
  else if (tag_name == "midpoint")
    tag = sdq::RiemannTag::midpoint;
  else
    throw config_error("tag must be left, midpoint or right, got '" + tag_name + "'");

  std::vector<sdq::WorkEquivalence> rows;
  for (long long j = 0; j < refinements; ++j)
    rows.push_back(sdq::work_equivalence(params, t_a, t_b, static_cast<std::size_t>(n) << j, tag));

  if (em.format == "csv") {
    em.write_text(sdq::work_equivalence_csv(rows));
  } else {
    json arr = json::array();
    for (const auto& row : rows) arr.push_back(sdq::work_equivalence_json(row));
    em.write_json(arr);
  }

  std::string line = "transform-check: w_time = " + sdq::format_double(rows.back().w_time) +
                     ", w_position = " + sdq::format_double(rows.back().w_position) +
                     ", gap = " + sdq::format_double(rows.back().gap);
  if (rows.size() >= 2 && rows.back().gap > 0.0) {
    const double order = std::log2(rows[rows.size() - 2].gap / rows.back().gap);
    line += ", observed order = " + sdq::format_double(order);
  }
  em.summary(line + wrote_suffix(em));
}

// ---- spectrum ---------------------------------------------------------------

void run_spectrum(const json& p, const Emitter& em) {
  check_keys(p, {"m", "eta", "hbar", "x_min", "x_max", "n_points", "n_states"}, "spectrum params");
  sdq::QuantumParams qp;
  qp.m = get_num(p, "m", 1.0);
  qp.eta = get_num(p, "eta", 1.0);
  qp.hbar = get_num(p, "hbar", 1.0);
  qp.validate();
  // default box half-width 12*sqrt(hbar/eta) keeps tails of the first few
  // states below the wall-leak tolerance
  const double half_width = 12.0 * std::sqrt(qp.hbar / qp.eta);
  sdq::SpatialGrid grid;
  grid.x_min = get_num(p, "x_min", -half_width);
  grid.x_max = get_num(p, "x_max", half_width);
  const long long n_points = get_int(p, "n_points", 4001);
  if (n_points < 2) throw sdq::validation_error("spectrum: n_points must be >= 2");
  grid.n = static_cast<std::size_t>(n_points);
  const long long n_states = get_int(p, "n_states", 6);
  if (n_states < 1) throw sdq::validation_error("spectrum: n_states must be >= 1");

  const sdq::Spectrum spec = sdq::solve_spectrum_fd(qp, grid, static_cast<std::size_t>(n_states));

  std::string files;
  if (em.format == "csv") {
    if (em.path.empty())
      throw config_error("spectrum with csv format needs --output (one file per state)");
    std::string energies = "n,energy\n";
    for (std::size_t i = 0; i < spec.energies.size(); ++i)
      energies += std::to_string(i) + "," + sdq::format_double(spec.energies[i]) + "\n";
    em.write_text(energies);
    const std::filesystem::path base(em.path);
    for (std::size_t k = 0; k < spec.states.size(); ++k) {
      std::filesystem::path state_path = base.parent_path() /
          (base.stem().string() + ".state" + std::to_string(k) + base.extension().string());
      em.write_to(state_path.string(), sdq::state_csv(spec, k));
      files += " " + state_path.string();
    }
  } else {
    em.write_json(sdq::spectrum_json(spec));
  }

  std::string line = "spectrum: energies =";
  for (double e : spec.energies) line += " " + sdq::format_double(e);
  em.summary(line + wrote_suffix(em) + files);
}

// ---- tunnel -----------------------------------------------------------------

struct TunnelSetup {
  sdq::BarrierConfig base;
  bool by_wavenumber = false;
  double k = 0.0;
  sdq::TunnelMode mode = sdq::TunnelMode::numeric;
  sdq::Interior interior = sdq::Interior::dissipative_only;
  std::size_t n_steps = 20000;
};

TunnelSetup tunnel_setup_from(const json& p, const std::string& mode_flag) {
  check_keys(p, {"mode", "m", "eta", "hbar", "V_B", "E", "k", "dq", "interior", "n_steps"},
             "tunnel params");
  TunnelSetup setup;
  setup.base.m = get_num(p, "m", 1.0);
  setup.base.eta = get_num(p, "eta", 1.0);
  setup.base.hbar = get_num(p, "hbar", 1.0);
  setup.base.V_B = get_num(p, "V_B", 1.0);
  setup.base.dq = get_num(p, "dq", 1.0);

  const std::optional<double> energy = get_opt_num(p, "E");
  const std::optional<double> wavenumber = get_opt_num(p, "k");
  if (energy && wavenumber) throw config_error("give either 'E' or 'k', not both");
  if (wavenumber) {
    setup.by_wavenumber = true;
    setup.k = *wavenumber;
    setup.base = sdq::BarrierConfig::from_wavenumber(setup.base.m, setup.base.eta, setup.base.hbar,
                                                     setup.base.V_B, *wavenumber, setup.base.dq);
  } else {
    setup.base.E = energy.value_or(0.5);
  }
  setup.base.validate();

  const std::string mode_name = !mode_flag.empty() ? mode_flag : get_str(p, "mode", "numeric");
  setup.mode = sdq::parse_tunnel_mode(mode_name);
  setup.interior = sdq::parse_interior(get_str(p, "interior", "dissipative_only"));
  const long long n_steps = get_int(p, "n_steps", 20000);
  if (n_steps < 1) throw sdq::validation_error("tunnel: n_steps must be positive");
  setup.n_steps = static_cast<std::size_t>(n_steps);
  return setup;
}

void run_tunnel(const json& p, const std::string& mode_flag, const Emitter& em) {
  const TunnelSetup setup = tunnel_setup_from(p, mode_flag);
  const sdq::TunnelRecord rec{setup.base,
                              sdq::run_transmission(setup.base, setup.mode, setup.interior, setup.n_steps)};
  if (em.format == "csv")
    em.write_text(sdq::tunnel_csv({rec}));
  else
    em.write_json(sdq::tunnel_json(rec));
  std::string line = std::string("tunnel ") + sdq::to_string(setup.mode) +
                     ": T = " + sdq::format_double(rec.result.T);
  if (rec.result.R) line += ", R = " + sdq::format_double(*rec.result.R);
  if (rec.result.flux_error) line += ", flux_error = " + sdq::format_double(*rec.result.flux_error);
  if (rec.result.nonphysical) line += " (nonphysical: T > 1)";
  em.summary(line + wrote_suffix(em));
}

// ---- sweep ------------------------------------------------------------------

std::vector<double> sweep_values(const json& s) {
  if (s.contains("values")) {
    if (s.contains("start") || s.contains("stop") || s.contains("count") || s.contains("spacing"))
      throw config_error("sweep: give either 'values' or start/stop/count, not both");
    if (!s.at("values").is_array() || s.at("values").empty())
      throw config_error("sweep: 'values' must be a non-empty array of numbers");
    std::vector<double> values;
    for (const auto& v : s.at("values")) {
      if (!v.is_number()) throw config_error("sweep: 'values' must be a non-empty array of numbers");
      values.push_back(v.get<double>());
    }
    return values;
  }
  if (!s.contains("start") || !s.contains("stop") || !s.contains("count"))
    throw config_error("sweep: needs 'values' or all of start/stop/count");
  const double start = get_num(s, "start", 0.0);
  const double stop = get_num(s, "stop", 0.0);
  const long long count = get_int(s, "count", 0);
  const std::string spacing = get_str(s, "spacing", "linear");
  if (count < 2) throw sdq::validation_error("sweep: count must be >= 2");
  if (!(start < stop)) throw sdq::validation_error("sweep: requires start < stop");
  std::vector<double> values(static_cast<std::size_t>(count));
  if (spacing == "linear") {
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (long long i = 0; i < count; ++i) values[static_cast<std::size_t>(i)] = start + step * i;
  } else if (spacing == "log") {
    if (!(start > 0.0)) throw sdq::validation_error("sweep: log spacing requires positive endpoints");
    const double step = (std::log(stop) - std::log(start)) / static_cast<double>(count - 1);
    for (long long i = 0; i < count; ++i)
      values[static_cast<std::size_t>(i)] = std::exp(std::log(start) + step * i);
  } else {
    throw config_error("sweep: spacing must be linear or log, got '" + spacing + "'");
  }
  return values;
}

sdq::BarrierConfig apply_variable(const TunnelSetup& setup, const std::string& variable, double value) {
  sdq::BarrierConfig cfg = setup.base;
  if (variable == "dq")
    cfg.dq = value;
  else if (variable == "eta")
    cfg.eta = value;
  else if (variable == "hbar")
    cfg.hbar = value;
  else if (variable == "V_B")
    cfg.V_B = value;
  else if (variable == "m")
    cfg.m = value;
  else if (variable == "E")
    cfg.E = value;
  else if (variable == "k")
    cfg = sdq::BarrierConfig::from_wavenumber(cfg.m, cfg.eta, cfg.hbar, cfg.V_B, value, cfg.dq);
  else
    throw config_error("sweep: unknown tunnel variable '" + variable + "'");
  if (setup.by_wavenumber && variable != "k" && variable != "E") {
    // keep the wavenumber fixed when the swept variable changes the
    // energy-wavenumber relation
    cfg = sdq::BarrierConfig::from_wavenumber(cfg.m, cfg.eta, cfg.hbar, cfg.V_B, setup.k, cfg.dq);
  }
  cfg.validate();
  return cfg;
}

void run_tunnel_sweep(const TunnelSetup& setup, const std::string& variable,
                      const std::vector<double>& values, bool parallel, const std::string& fit_output,
                      const Emitter& em) {
  const std::size_t n = values.size();
  std::vector<sdq::BarrierConfig> cfgs;
  cfgs.reserve(n);
  for (double v : values) cfgs.push_back(apply_variable(setup, variable, v));

  std::vector<sdq::TransmissionResult> results(n);
  std::vector<std::string> failures(n);
  std::vector<int> failure_kind(n, 0);
  const auto eval_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      try {
        results[i] = sdq::run_transmission(cfgs[i], setup.mode, setup.interior, setup.n_steps);
      } catch (const sdq::validation_error& e) {
        failure_kind[i] = 2;
        failures[i] = e.what();
      } catch (const std::exception& e) {
        failure_kind[i] = 3;
        failures[i] = e.what();
      }
    }
  };

  if (parallel && n > 1) {
    const std::size_t workers = std::min<std::size_t>(
        {n, std::max<std::size_t>(1, std::thread::hardware_concurrency()), 8});
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      if (lo >= n) break;
      pool.emplace_back(eval_range, lo, std::min(n, lo + chunk));
    }
    for (std::thread& t : pool) t.join();
  } else {
    eval_range(0, n);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (failure_kind[i] == 0) continue;
    const std::string msg = "sweep aborted at " + variable + " = " + sdq::format_double(values[i]) +
                            ": " + failures[i];
    if (failure_kind[i] == 2) throw sdq::validation_error(msg);
    throw sdq::numerical_error(msg);
  }

  std::vector<sdq::TunnelRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) records.push_back({cfgs[i], results[i]});

  if (em.format == "csv")
    em.write_text(sdq::tunnel_csv(records));
  else
    em.write_json(sdq::tunnel_json(records));

  std::string line = "sweep tunnel " + variable + ": " + std::to_string(n) + " points, mode " +
                     sdq::to_string(setup.mode);
  if (!fit_output.empty()) {
    if (variable != "dq")
      throw sdq::validation_error("sweep: suppression fit needs a dq sweep, got variable '" + variable +
                                  "'");
    const sdq::SuppressionFit fit =
        sdq::suppression_fit(setup.base, values, setup.mode, setup.interior, setup.n_steps);
    em.write_to(fit_output, sdq::suppression_json(fit).dump(2) + "\n");
    line += ", fit slope = " + sdq::format_double(fit.slope) + " (wrote " + fit_output + ")";
  }
  em.summary(line + wrote_suffix(em));
}

void run_energy_sweep(const json& p, const std::string& variable, const std::vector<double>& values,
                      const Emitter& em) {
  check_keys(p, {"m", "eta", "hbar"}, "sweep energy params");
  if (variable != "n") throw config_error("sweep: energy target sweeps 'n', got '" + variable + "'");
  sdq::QuantumParams qp;
  qp.m = get_num(p, "m", 1.0);
  qp.eta = get_num(p, "eta", 1.0);
  qp.hbar = get_num(p, "hbar", 1.0);
  qp.validate();

  std::vector<std::pair<int, double>> rows;
  for (double v : values) {
    const double rounded = std::nearbyint(v);
    if (!(std::abs(v - rounded) < 1e-9) || rounded < 0.0)
      throw sdq::validation_error("sweep: level index must be a nonnegative integer, got " +
                                  sdq::format_double(v));
    const int level = static_cast<int>(rounded);
    rows.emplace_back(level, sdq::analytic_energy(level, qp));
  }

  if (em.format == "csv") {
    std::string out = "n,energy\n";
    for (const auto& [level, energy] : rows)
      out += std::to_string(level) + "," + sdq::format_double(energy) + "\n";
    em.write_text(out);
  } else {
    json arr = json::array();
    for (const auto& [level, energy] : rows) arr.push_back(json{{"n", level}, {"energy", energy}});
    em.write_json(arr);
  }
  em.summary("sweep energy n: " + std::to_string(rows.size()) + " levels" + wrote_suffix(em));
}

void run_sweep(const json& params, const json& sweep_block, const std::string& mode_flag,
               const std::string& fit_flag, const Emitter& em) {
  if (!sweep_block.is_object() || sweep_block.empty())
    throw config_error("sweep command needs a 'sweep' block in the config");
  check_keys(sweep_block,
             {"target", "variable", "values", "start", "stop", "count", "spacing", "parallel",
              "fit_output"},
             "sweep block");
  const std::string target = get_str(sweep_block, "target", "tunnel");
  const std::string variable = get_str(sweep_block, "variable", "");
  if (variable.empty()) throw config_error("sweep: 'variable' is required");
  const std::vector<double> values = sweep_values(sweep_block);
  const bool parallel = get_bool(sweep_block, "parallel", false);
  const std::string fit_output =
      !fit_flag.empty() ? fit_flag : get_str(sweep_block, "fit_output", "");

  if (target == "tunnel") {
    const TunnelSetup setup = tunnel_setup_from(params, mode_flag);
    run_tunnel_sweep(setup, variable, values, parallel, fit_output, em);
  } else if (target == "energy") {
    if (!fit_output.empty()) throw config_error("sweep: fit_output applies to the tunnel target only");
    run_energy_sweep(params, variable, values, em);
  } else {
    throw config_error("sweep: target must be tunnel or energy, got '" + target + "'");
  }
}

// ---- dispatch ---------------------------------------------------------------

void emit_error(int code, const char* kind, const std::string& message) {
  const json err{{"error", json{{"code", code}, {"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
}

std::string default_format(const std::string& command) {
  if (command == "trajectory" || command == "sweep") return "csv";
  return "json";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viscous-media dissipative dynamics toolbox"};
  app.require_subcommand(1);

  std::string config_path, output_path, format, tunnel_mode, fit_output;

  const auto add_global = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--output", output_path, "output file (default: stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--quiet", "suppress the summary line");
  };

  add_global(app.add_subcommand("trajectory", "sample a viscous-media trajectory"));
  add_global(app.add_subcommand("classify", "run the strict-dissipativity checks"));
  add_global(app.add_subcommand("transform-check", "compare time-side and position-side dissipated work"));
  add_global(app.add_subcommand("spectrum", "finite-difference eigenpairs of the quantized system"));
  CLI::App* tunnel_cmd = app.add_subcommand("tunnel", "barrier transmission, one configuration");
  add_global(tunnel_cmd);
  tunnel_cmd->add_option("--mode", tunnel_mode, "closed_form, matching, baseline or numeric");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "evaluate over a parameter sweep");
  add_global(sweep_cmd);
  sweep_cmd->add_option("--mode", tunnel_mode, "tunnel mode for the sweep");
  sweep_cmd->add_option("--fit-output", fit_output, "also write a suppression fit (dq sweeps)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();

  try {
    const json root = load_config(config_path);
    check_keys(root, {"command", "params", "output", "seed", "sweep"}, "config");
    if (root.contains("command")) {
      const std::string declared = get_str(root, "command", "");
      if (declared != command)
        throw config_error("config is for command '" + declared + "', invoked as '" + command + "'");
    }
    if (root.contains("seed") && !root.at("seed").is_number_integer())
      throw config_error("key 'seed' must be an integer");
    json params = root.value("params", json::object());
    if (!params.is_object()) throw config_error("'params' must be an object");

    Emitter em;
    if (root.contains("output")) {
      const json& out = root.at("output");
      if (!out.is_object()) throw config_error("'output' must be an object");
      check_keys(out, {"path", "format"}, "output block");
      em.path = get_str(out, "path", "");
      em.format = get_str(out, "format", "");
      if (!em.format.empty() && em.format != "csv" && em.format != "json")
        throw config_error("output format must be csv or json, got '" + em.format + "'");
    }
    if (!output_path.empty()) em.path = output_path;
    if (!format.empty()) em.format = format;
    if (em.format.empty()) em.format = default_format(command);
    em.quiet = chosen->count("--quiet") > 0;

    if (command == "trajectory")
      run_trajectory(params, em);
    else if (command == "classify")
      run_classify(params, em);
    else if (command == "transform-check")
      run_transform_check(params, em);
    else if (command == "spectrum")
      run_spectrum(params, em);
    else if (command == "tunnel")
      run_tunnel(params, tunnel_mode, em);
    else
      run_sweep(params, root.value("sweep", json::object()), tunnel_mode, fit_output, em);
    return 0;
  } catch (const config_error& e) {
    emit_error(1, "config", e.what());
    return 1;
  } catch (const sdq::validation_error& e) {
    emit_error(2, "validation", e.what());
    return 2;
  } catch (const sdq::numerical_error& e) {
    emit_error(3, "numerical", e.what());
    return 3;
  } catch (const io_error& e) {
    emit_error(4, "io", e.what());
    return 4;
  } catch (const std::exception& e) {
    emit_error(3, "internal", e.what());
    return 3;
  }
}
