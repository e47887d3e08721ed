#ifndef REACHTRACK_IO_OUTPUTS_HPP
#define REACHTRACK_IO_OUTPUTS_HPP

// Output directory layout:
//   manifest.json            expanded config and trace index
//   path.csv                 reference of the representative (first) seed
//   traces/<ctrl>_seed<N>.csv
//   runs.csv, summary.csv, summary.json, delta_curve.csv
//   fig1_paths.svg ... fig4_freeze_removed.svg
//   screen.csv, screen.json  (screen subcommand)
// Figures are always rendered from the stored CSVs, so re-plotting a
// directory reproduces them exactly.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "reachtrack/experiments.hpp"
#include "reachtrack/io/config.hpp"
#include "reachtrack/io/csv.hpp"
#include "reachtrack/io/svg.hpp"
#include "reachtrack/offline_screen.hpp"

namespace reachtrack::io {

namespace fs = std::filesystem;

/// Creates the directory if needed and proves it accepts a new file.
inline void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
  const fs::path probe = dir / ".reachtrack_write_probe";
  {
    std::ofstream f(probe, std::ios::binary);
    if (!(f << 'x') || !f.flush()) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

inline void write_text(const fs::path& file, const std::string& text) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  std::ofstream f(file, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + file.string() + "' for writing");
  f << text;
  if (!f.flush()) throw IoError("failed writing '" + file.string() + "'");
}

inline std::string read_text(const fs::path& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) throw IoError("cannot read '" + file.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

template <class Writer>
void write_with(const fs::path& file, Writer&& w) {
  std::ostringstream ss;
  w(ss);
  write_text(file, ss.str());
}

inline std::string trace_name(Controller c, std::uint64_t seed) {
  return std::string("traces/") + to_string(c) + "_seed" + std::to_string(seed) + ".csv";
}

inline void write_screen_outputs(const ReferencePath<2>& path, const ScreenReport& rep, const fs::path& out) {
  write_with(out / "path.csv", [&](std::ostream& os) { write_path_csv(os, path); });
  write_with(out / "screen.csv", [&](std::ostream& os) { write_screen_csv(os, rep); });
  write_text(out / "screen.json", screen_json(rep).dump(2) + "\n");
}

/// Renders the four figures from a directory written by emit_outputs.
inline void render_figures(const fs::path& out) {
  const auto manifest = nlohmann::json::parse(read_text(out / "manifest.json"), nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("representative_seed")) {
    throw IoError("'" + (out / "manifest.json").string() + "' is not a valid manifest");
  }
  const auto seed = manifest.at("representative_seed").get<std::uint64_t>();
  const double t_s = manifest.at("t_s").get<double>();
  const auto bins = manifest.at("histogram_bins").get<std::size_t>();

  std::vector<PathRow> path;
  {
    std::istringstream in(read_text(out / "path.csv"));
    path = read_path_csv(in);
  }
  std::vector<ControllerTrace> runs;
  for (auto c : {Controller::qp, Controller::pp}) {
    const fs::path f = out / trace_name(c, seed);
    if (!fs::exists(f)) continue;
    std::istringstream in(read_text(f));
    runs.push_back({c, read_trace_csv(in)});
  }
  if (runs.empty()) throw IoError("no traces for seed " + std::to_string(seed) + " under '" + out.string() + "'");

  std::vector<RunRecord> records;
  {
    std::istringstream in(read_text(out / "runs.csv"));
    records = read_runs_csv(in);
  }
  std::vector<MarginSet> margins;
  for (auto c : {Controller::qp, Controller::pp}) {
    MarginSet m{c, {}};
    for (const auto& r : records) {
      if (r.controller == c) m.per_run_mean_delta.push_back(r.mean_delta);
    }
    if (!m.per_run_mean_delta.empty()) margins.push_back(std::move(m));
  }
  DeltaCurves curves;
  {
    std::istringstream in(read_text(out / "delta_curve.csv"));
    curves = read_delta_curve_csv(in);
  }

  write_text(out / "fig1_paths.svg", figure_paths(path, runs, "seed " + std::to_string(seed)));
  write_text(out / "fig2_margin_histogram.svg", figure_margin_histogram(margins, bins));
  write_text(out / "fig3_margin_time.svg", figure_margin_time(curves));
  write_text(out / "fig4_freeze_removed.svg", figure_freeze_removed(runs, t_s));
}

/// Writes traces, summaries and figures for a finished set of trials.
inline void emit_outputs(const AppConfig& cfg, std::span<const TrialResult> results, const fs::path& out) {
  if (results.empty()) throw ConfigError("emit_outputs needs at least one result");
  ensure_writable(out);
  const std::uint64_t rep_seed = results.front().seed;

  const auto path =
      random_path(rep_seed, cfg.trial.workspace, cfg.trial.path_duration, cfg.trial.grid_resolution);
  write_with(out / "path.csv", [&](std::ostream& os) { write_path_csv(os, path); });

  auto traces = nlohmann::json::array();
  for (const auto& r : results) {
    const auto name = trace_name(r.controller, r.seed);
    write_with(out / name, [&](std::ostream& os) { write_trace_csv(os, r.trace); });
    traces.push_back({{"seed", r.seed}, {"controller", to_string(r.controller)}, {"file", name}});
  }

  const auto summary = aggregate(results, cfg.grid_points, cfg.histogram_bins);
  write_with(out / "runs.csv", [&](std::ostream& os) { write_runs_csv(os, results); });
  write_with(out / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, summary); });
  write_text(out / "summary.json", summary_json(summary).dump(2) + "\n");
  write_with(out / "delta_curve.csv", [&](std::ostream& os) { write_delta_curve_csv(os, summary); });

  nlohmann::json m;
  m["config"] = to_json(cfg);
  m["representative_seed"] = rep_seed;
  m["t_s"] = results.front().t_s;
  m["histogram_bins"] = cfg.histogram_bins;
  m["duration"] = cfg.trial.duration;
  m["freeze_duration"] = cfg.trial.freeze_duration;
  m["traces"] = traces;
  write_text(out / "manifest.json", m.dump(2) + "\n");

  render_figures(out);
}

}  // namespace reachtrack::io

#endif  // REACHTRACK_IO_OUTPUTS_HPP
