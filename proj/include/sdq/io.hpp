#pragma once

// CSV and JSON emission for every result type, plus the parsers used for
// round-trip checks. All floating-point output uses the shortest decimal
// form that parses back to the identical bits.

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "sdq/classical.hpp"
#include "sdq/errors.hpp"
#include "sdq/reparam.hpp"
#include "sdq/spectrum.hpp"
#include "sdq/tunnelling.hpp"

namespace sdq {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw validation_error("not a number: '" + std::string(s) + "'");
  return v;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

// ---- trajectories ----------------------------------------------------------

inline std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,q,v\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_double(traj.t[i]);
    out += ',';
    out += format_double(traj.q[i]);
    out += ',';
    out += format_double(traj.v[i]);
    out += '\n';
  }
  return out;
}

inline Trajectory parse_trajectory_csv(std::string_view text) {
  Trajectory traj;
  std::size_t start = 0;
  bool header = true;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    if (header) {
      if (line != "t,q,v") throw validation_error("trajectory CSV must start with header t,q,v");
      header = false;
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 3) throw validation_error("trajectory CSV row needs 3 fields: '" + std::string(line) + "'");
    traj.t.push_back(parse_double(fields[0]));
    traj.q.push_back(parse_double(fields[1]));
    traj.v.push_back(parse_double(fields[2]));
  }
  if (traj.t.size() < 2) throw validation_error("trajectory CSV needs at least 2 samples");
  traj.dt = traj.t[1] - traj.t[0];
  traj.check();
  return traj;
}

// ---- classification --------------------------------------------------------

inline nlohmann::json sd_report_json(const SDReport& report) {
  return nlohmann::json{
      {"kinetic_strictly_decreasing", report.kinetic_strictly_decreasing},
      {"trajectory_monotonic", report.trajectory_monotonic},
      {"kinetic_vanishes", report.kinetic_vanishes},
      {"work_nondecreasing", report.work_nondecreasing},
      {"first_violation_index", report.first_violation_index()},
  };
}

// ---- work equivalence ------------------------------------------------------

inline nlohmann::json work_equivalence_json(const WorkEquivalence& we) {
  return nlohmann::json{
      {"n", we.n},
      {"w_time", we.w_time},
      {"w_position", we.w_position},
      {"gap", we.gap},
  };
}

inline std::string work_equivalence_csv(const std::vector<WorkEquivalence>& rows) {
  std::string out = "n,w_time,w_position,gap\n";
  for (const WorkEquivalence& we : rows) {
    out += std::to_string(we.n);
    out += ',';
    out += format_double(we.w_time);
    out += ',';
    out += format_double(we.w_position);
    out += ',';
    out += format_double(we.gap);
    out += '\n';
  }
  return out;
}

// ---- spectrum ---------------------------------------------------------------

inline nlohmann::json spectrum_json(const Spectrum& spec) {
  nlohmann::json grid{{"x_min", spec.grid.x_min}, {"x_max", spec.grid.x_max}, {"n", spec.grid.n}};
  return nlohmann::json{{"energies", spec.energies}, {"grid", grid}, {"states", spec.states}};
}

/// One eigenfunction as x,phi rows.
inline std::string state_csv(const Spectrum& spec, std::size_t state) {
  if (state >= spec.states.size())
    throw validation_error("state_csv: no state " + std::to_string(state));
  std::string out = "x,phi\n";
  for (std::size_t i = 0; i < spec.grid.n; ++i) {
    out += format_double(spec.grid.x(i));
    out += ',';
    out += format_double(spec.states[state][i]);
    out += '\n';
  }
  return out;
}

// ---- tunnelling -------------------------------------------------------------

struct TunnelRecord {
  BarrierConfig cfg;
  TransmissionResult result;
};

inline const std::string& tunnel_csv_header() {
  static const std::string header = "mode,m,eta,hbar,V_B,E,k,dq,T,R,flux_error,nonphysical";
  return header;
}

inline std::string tunnel_csv_row(const TunnelRecord& rec) {
  std::string out;
  out += to_string(rec.result.mode);
  out += ',';
  out += format_double(rec.cfg.m);
  out += ',';
  out += format_double(rec.cfg.eta);
  out += ',';
  out += format_double(rec.cfg.hbar);
  out += ',';
  out += format_double(rec.cfg.V_B);
  out += ',';
  out += format_double(rec.cfg.E);
  out += ',';
  out += format_double(rec.cfg.k());
  out += ',';
  out += format_double(rec.cfg.dq);
  out += ',';
  out += format_double(rec.result.T);
  out += ',';
  if (rec.result.R) out += format_double(*rec.result.R);
  out += ',';
  if (rec.result.flux_error) out += format_double(*rec.result.flux_error);
  out += ',';
  out += rec.result.nonphysical ? "true" : "false";
  return out;
}

inline std::string tunnel_csv(const std::vector<TunnelRecord>& records) {
  std::string out = tunnel_csv_header();
  out += '\n';
  for (const TunnelRecord& rec : records) {
    out += tunnel_csv_row(rec);
    out += '\n';
  }
  return out;
}

inline nlohmann::json tunnel_json(const TunnelRecord& rec) {
  nlohmann::json j{
      {"mode", to_string(rec.result.mode)},
      {"m", rec.cfg.m},
      {"eta", rec.cfg.eta},
      {"hbar", rec.cfg.hbar},
      {"V_B", rec.cfg.V_B},
      {"E", rec.cfg.E},
      {"k", rec.cfg.k()},
      {"dq", rec.cfg.dq},
      {"T", rec.result.T},
      {"nonphysical", rec.result.nonphysical},
  };
  j["R"] = rec.result.R ? nlohmann::json(*rec.result.R) : nlohmann::json(nullptr);
  j["flux_error"] = rec.result.flux_error ? nlohmann::json(*rec.result.flux_error) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json tunnel_json(const std::vector<TunnelRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TunnelRecord& rec : records) arr.push_back(tunnel_json(rec));
  return arr;
}

inline nlohmann::json suppression_json(const SuppressionFit& fit) {
  return nlohmann::json{
      {"slope", fit.slope},
      {"intercept", fit.intercept},
      {"r2", fit.r2},
      {"mode", to_string(fit.mode)},
  };
}

}  // namespace sdq
