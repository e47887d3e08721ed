#ifndef REACHTRACK_IO_CSV_HPP
#define REACHTRACK_IO_CSV_HPP

// CSV writers and readers for traces, reference paths, screen reports and
// batch summaries. Doubles use the shortest round-trip representation, so a
// written file re-reads to the identical bits.

#include <charconv>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "reachtrack/experiments.hpp"
#include "reachtrack/offline_screen.hpp"
#include "reachtrack/ref_path.hpp"

namespace reachtrack::io {

inline std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("malformed number '" + std::string(s) + "' in CSV");
  }
  return x;
}

/// Header plus string cells. Rows must match the header width.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw IoError("CSV is missing column '" + std::string(name) + "'");
  }
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split_csv_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.header.size()) {
      throw IoError("CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline Mode mode_from_string(std::string_view s) {
  if (s == "tracking") return Mode::tracking;
  if (s == "braking") return Mode::braking;
  if (s == "frozen") return Mode::frozen;
  throw IoError("unknown mode '" + std::string(s) + "'");
}

inline Controller controller_from_string(std::string_view s) {
  if (s == "qp") return Controller::qp;
  if (s == "pp") return Controller::pp;
  throw IoError("unknown controller '" + std::string(s) + "'");
}

// ---- trace ---------------------------------------------------------------

inline constexpr const char* kTraceHeader = "t,px,py,vx,vy,ux,uy,plax,play,vlax,vlay,delta,C,mode,moving";

inline void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace) {
    os << fmt(r.t) << ',' << fmt(r.p.x()) << ',' << fmt(r.p.y()) << ',' << fmt(r.v.x()) << ',' << fmt(r.v.y()) << ','
       << fmt(r.u.x()) << ',' << fmt(r.u.y()) << ',' << fmt(r.p_la.x()) << ',' << fmt(r.p_la.y()) << ','
       << fmt(r.v_la.x()) << ',' << fmt(r.v_la.y()) << ',' << fmt(r.delta) << ',' << fmt(r.C) << ','
       << to_string(r.mode) << ',' << (r.moving ? 1 : 0) << '\n';
  }
}

/// Columns not stored in the CSV (u_req, active_set) come back defaulted.
inline std::vector<TraceRow> read_trace_csv(std::istream& in) {
  const auto tab = read_csv(in);
  const std::size_t c[] = {tab.column("t"),    tab.column("px"),   tab.column("py"),   tab.column("vx"),
                           tab.column("vy"),   tab.column("ux"),   tab.column("uy"),   tab.column("plax"),
                           tab.column("play"), tab.column("vlax"), tab.column("vlay"), tab.column("delta"),
                           tab.column("C"),    tab.column("mode"), tab.column("moving")};
  std::vector<TraceRow> out;
  out.reserve(tab.rows.size());
  for (const auto& cells : tab.rows) {
    auto d = [&](int i) { return parse_double(cells[c[i]]); };
    TraceRow r;
    r.t = d(0);
    r.p = {d(1), d(2)};
    r.v = {d(3), d(4)};
    r.u = {d(5), d(6)};
    r.p_la = {d(7), d(8)};
    r.v_la = {d(9), d(10)};
    r.delta = d(11);
    r.C = d(12);
    r.mode = mode_from_string(cells[c[13]]);
    const auto& mv = cells[c[14]];
    if (mv != "0" && mv != "1") throw IoError("moving column must be 0 or 1");
    r.moving = mv == "1";
    out.push_back(r);
  }
  return out;
}

// ---- reference path --------------------------------------------------------

struct PathRow {
  double t = 0.0;
  Vec2 p = Vec2::Zero();
  Vec2 v = Vec2::Zero();
  Vec2 a = Vec2::Zero();
};

inline void write_path_csv(std::ostream& os, const ReferencePath<2>& path) {
  os << "t,px,py,vx,vy,ax,ay\n";
  for (const auto& g : path.dense_grid()) {
    os << fmt(g.t) << ',' << fmt(g.p.x()) << ',' << fmt(g.p.y()) << ',' << fmt(g.v.x()) << ',' << fmt(g.v.y()) << ','
       << fmt(g.a.x()) << ',' << fmt(g.a.y()) << '\n';
  }
}

inline std::vector<PathRow> read_path_csv(std::istream& in) {
  const auto tab = read_csv(in);
  const std::size_t c[] = {tab.column("t"),  tab.column("px"), tab.column("py"), tab.column("vx"),
                           tab.column("vy"), tab.column("ax"), tab.column("ay")};
  std::vector<PathRow> out;
  for (const auto& cells : tab.rows) {
    auto d = [&](int i) { return parse_double(cells[c[i]]); };
    out.push_back({d(0), {d(1), d(2)}, {d(3), d(4)}, {d(5), d(6)}});
  }
  return out;
}

// ---- screen ----------------------------------------------------------------

inline void write_screen_csv(std::ostream& os, const ScreenReport& rep) {
  os << "s,u_req,delta,unsafe_flag\n";
  for (const auto& s : rep.samples) {
    os << fmt(s.s) << ',' << fmt(s.u_req) << ',' << fmt(s.delta) << ',' << (s.delta > 0.0 ? 1 : 0) << '\n';
  }
}

inline nlohmann::json screen_json(const ScreenReport& rep) {
  nlohmann::json j;
  j["passed"] = rep.passed;
  j["sigma"] = rep.sigma_used;
  j["samples"] = rep.samples.size();
  std::size_t unsafe = 0;
  double worst = rep.samples.empty() ? 0.0 : rep.samples.front().delta;
  for (const auto& s : rep.samples) {
    unsafe += s.delta > 0.0 ? 1 : 0;
    worst = std::max(worst, s.delta);
  }
  j["unsafe_samples"] = unsafe;
  j["max_delta"] = worst;
  auto intervals = nlohmann::json::array();
  for (const auto& iv : rep.unsafe_intervals) intervals.push_back({{"s_start", iv.s_start}, {"s_end", iv.s_end}});
  j["unsafe_intervals"] = intervals;
  return j;
}

// ---- batch -------------------------------------------------------------------

struct RunRecord {
  std::uint64_t seed = 0;
  Controller controller = Controller::qp;
  double rmse_p = 0.0;
  double rmse_v = 0.0;
  double mean_delta = 0.0;
  double freeze_start = 0.0;
  std::size_t moving_samples = 0;
  double positive_margin_fraction = 0.0;
};

inline RunRecord make_record(const TrialResult& r) {
  RunRecord rec;
  rec.seed = r.seed;
  rec.controller = r.controller;
  rec.rmse_p = r.rmse_p;
  rec.rmse_v = r.rmse_v;
  rec.mean_delta = r.mean_delta;
  rec.freeze_start = static_cast<double>(r.freeze_begin) * r.t_s;
  std::size_t pos = 0;
  for (const auto& row : r.trace) {
    if (!row.moving) continue;
    ++rec.moving_samples;
    pos += row.delta > 0.0 ? 1 : 0;
  }
  rec.positive_margin_fraction =
      rec.moving_samples ? static_cast<double>(pos) / static_cast<double>(rec.moving_samples) : 0.0;
  return rec;
}

inline void write_runs_csv(std::ostream& os, std::span<const TrialResult> results) {
  os << "seed,controller,rmse_p,rmse_v,mean_delta,freeze_start,moving_samples,positive_margin_fraction\n";
  for (const auto& r : results) {
    const auto rec = make_record(r);
    os << rec.seed << ',' << to_string(rec.controller) << ',' << fmt(rec.rmse_p) << ',' << fmt(rec.rmse_v) << ','
       << fmt(rec.mean_delta) << ',' << fmt(rec.freeze_start) << ',' << rec.moving_samples << ','
       << fmt(rec.positive_margin_fraction) << '\n';
  }
}

inline std::vector<RunRecord> read_runs_csv(std::istream& in) {
  const auto tab = read_csv(in);
  const std::size_t c[] = {tab.column("seed"),         tab.column("controller"),     tab.column("rmse_p"),
                           tab.column("rmse_v"),       tab.column("mean_delta"),     tab.column("freeze_start"),
                           tab.column("moving_samples"), tab.column("positive_margin_fraction")};
  std::vector<RunRecord> out;
  for (const auto& cells : tab.rows) {
    RunRecord rec;
    rec.seed = std::stoull(cells[c[0]]);
    rec.controller = controller_from_string(cells[c[1]]);
    rec.rmse_p = parse_double(cells[c[2]]);
    rec.rmse_v = parse_double(cells[c[3]]);
    rec.mean_delta = parse_double(cells[c[4]]);
    rec.freeze_start = parse_double(cells[c[5]]);
    rec.moving_samples = std::stoull(cells[c[6]]);
    rec.positive_margin_fraction = parse_double(cells[c[7]]);
    out.push_back(rec);
  }
  return out;
}

inline void write_summary_csv(std::ostream& os, const BatchSummary& s) {
  os << "controller,runs,rmse_p_mean,rmse_p_std,rmse_v_mean,rmse_v_std,mean_delta_mean,mean_delta_std\n";
  for (const auto& c : s.controllers) {
    os << to_string(c.controller) << ',' << c.runs << ',' << fmt(c.rmse_p.mean) << ',' << fmt(c.rmse_p.std) << ','
       << fmt(c.rmse_v.mean) << ',' << fmt(c.rmse_v.std) << ',' << fmt(c.mean_delta.mean) << ','
       << fmt(c.mean_delta.std) << '\n';
  }
}

inline nlohmann::json summary_json(const BatchSummary& s) {
  nlohmann::json j;
  auto ctrls = nlohmann::json::object();
  for (const auto& c : s.controllers) {
    nlohmann::json e;
    e["runs"] = c.runs;
    e["rmse_p"] = {{"mean", c.rmse_p.mean}, {"std", c.rmse_p.std}};
    e["rmse_v"] = {{"mean", c.rmse_v.mean}, {"std", c.rmse_v.std}};
    e["mean_delta"] = {{"mean", c.mean_delta.mean}, {"std", c.mean_delta.std}};
    e["per_run_mean_delta"] = c.per_run_mean_delta;
    e["histogram"] = {{"lo", c.histogram.lo}, {"width", c.histogram.width}, {"counts", c.histogram.counts}};
    ctrls[to_string(c.controller)] = e;
  }
  j["controllers"] = ctrls;
  const auto* qp = s.find(Controller::qp);
  const auto* pp = s.find(Controller::pp);
  if (qp && pp && pp->rmse_p.mean > 0.0 && pp->rmse_v.mean > 0.0) {
    j["ratio_qp_over_pp"] = {{"rmse_p", qp->rmse_p.mean / pp->rmse_p.mean},
                             {"rmse_v", qp->rmse_v.mean / pp->rmse_v.mean}};
  }
  j["grid_points"] = s.grid.size();
  return j;
}

/// Mean delta(T) per controller on the normalized moving-time grid.
inline void write_delta_curve_csv(std::ostream& os, const BatchSummary& s) {
  os << "T";
  for (const auto& c : s.controllers) os << ',' << to_string(c.controller);
  os << '\n';
  for (std::size_t g = 0; g < s.grid.size(); ++g) {
    os << fmt(s.grid[g]);
    for (const auto& c : s.controllers) os << ',' << fmt(c.delta_curve[g]);
    os << '\n';
  }
}

struct DeltaCurves {
  std::vector<double> grid;
  std::vector<std::pair<Controller, std::vector<double>>> curves;
};

inline DeltaCurves read_delta_curve_csv(std::istream& in) {
  const auto tab = read_csv(in);
  DeltaCurves out;
  const auto tc = tab.column("T");
  for (std::size_t i = 0; i < tab.header.size(); ++i) {
    if (i != tc) out.curves.push_back({controller_from_string(tab.header[i]), {}});
  }
  for (const auto& cells : tab.rows) {
    out.grid.push_back(parse_double(cells[tc]));
    std::size_t k = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i != tc) out.curves[k++].second.push_back(parse_double(cells[i]));
    }
  }
  return out;
}

}  // namespace reachtrack::io

#endif  // REACHTRACK_IO_CSV_HPP
