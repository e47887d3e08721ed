// reachtrack: screen, simulate, batch and plot from the command line.
//
// Exit codes: 0 success, 1 invalid configuration or arguments, 2 I/O failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "reachtrack/experiments.hpp"
#include "reachtrack/io/config.hpp"
#include "reachtrack/io/outputs.hpp"
#include "reachtrack/offline_screen.hpp"

namespace {

using namespace reachtrack;

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> controller;
  std::optional<std::size_t> trials;
  std::vector<std::string> overrides;
};

io::AppConfig resolve(const Options& o) {
  std::vector<std::string> sets = o.overrides;
  if (o.seed) sets.push_back("experiment.seed=" + std::to_string(*o.seed));
  if (o.trials) sets.push_back("experiment.trials=" + std::to_string(*o.trials));
  if (o.controller) sets.push_back("experiment.controller=\"" + *o.controller + "\"");
  return o.config.empty() ? io::default_config(sets) : io::load_config(o.config, sets);
}

void print_summary(const BatchSummary& s) {
  std::printf("%-4s %5s %14s %14s %14s\n", "ctrl", "runs", "rmse_p (m)", "rmse_v (m/s)", "mean delta");
  for (const auto& c : s.controllers) {
    std::printf("%-4s %5zu %14.6g %14.6g %14.6g\n", to_string(c.controller), c.runs, c.rmse_p.mean, c.rmse_v.mean,
                c.mean_delta.mean);
  }
  const auto* qp = s.find(Controller::qp);
  const auto* pp = s.find(Controller::pp);
  if (qp && pp) {
    std::printf("ratio qp/pp: rmse_p %.4f  rmse_v %.4f\n", qp->rmse_p.mean / pp->rmse_p.mean,
                qp->rmse_v.mean / pp->rmse_v.mean);
  }
}

int cmd_screen(const Options& o) {
  const auto cfg = resolve(o);
  io::ensure_writable(o.out);
  const auto& t = cfg.trial;
  const auto path = random_path(t.seed, t.workspace, t.path_duration, t.grid_resolution);
  const auto rep = screen_path<2>(path, t.limits, t.noise, t.screen_samples);
  io::write_screen_outputs(path, rep, o.out);
  std::printf("seed %llu: %s, %zu unsafe interval(s), sigma %.6g\n", static_cast<unsigned long long>(t.seed),
              rep.passed ? "reachable" : "unreachable segments found", rep.unsafe_intervals.size(), rep.sigma_used);
  for (const auto& iv : rep.unsafe_intervals) std::printf("  unsafe s in [%.6g, %.6g]\n", iv.s_start, iv.s_end);
  return 0;
}

int cmd_run(const Options& o) {
  auto cfg = resolve(o);
  io::ensure_writable(o.out);
  const auto results = run_batch(cfg.trial, 1, cfg.controllers, 1);
  cfg.trials = 1;
  io::emit_outputs(cfg, results, o.out);
  for (const auto& r : results) {
    std::printf("%s seed %llu: rmse_p %.6g m, rmse_v %.6g m/s, mean delta %.6g\n", to_string(r.controller),
                static_cast<unsigned long long>(r.seed), r.rmse_p, r.rmse_v, r.mean_delta);
  }
  return 0;
}

int cmd_batch(const Options& o) {
  const auto cfg = resolve(o);
  io::ensure_writable(o.out);
  const auto results = run_batch(cfg.trial, cfg.trials, cfg.controllers, cfg.threads);
  io::emit_outputs(cfg, results, o.out);
  print_summary(aggregate(results, cfg.grid_points, cfg.histogram_bins));
  return 0;
}

int cmd_plot(const Options& o) {
  io::render_figures(o.out);
  std::printf("figures written to %s\n", o.out.c_str());
  return 0;
}

void add_common(CLI::App* sub, Options& o, bool simulate) {
  sub->add_option("--config", o.config, "JSON configuration file");
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--seed", o.seed, "trial seed (batch: first seed)");
  sub->add_option("--set", o.overrides, "override section.key=value (repeatable)")->allow_extra_args(false);
  if (simulate) {
    sub->add_option("--controller", o.controller, "qp, pp or both")->check(CLI::IsMember({"qp", "pp", "both"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reachability-guided path tracking: screen, simulate, batch, plot"};
  app.require_subcommand(1);
  Options o;

  auto* screen = app.add_subcommand("screen", "offline reachability screen of one reference path");
  add_common(screen, o, false);
  auto* run = app.add_subcommand("run", "one seeded trial per controller");
  add_common(run, o, true);
  auto* batch = app.add_subcommand("batch", "paired-seed Monte-Carlo batch");
  add_common(batch, o, true);
  batch->add_option("--trials", o.trials, "number of seeds")->check(CLI::PositiveNumber);
  auto* plot = app.add_subcommand("plot", "re-render figures from a results directory");
  plot->add_option("--out", o.out, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*screen) return cmd_screen(o);
    if (*run) return cmd_run(o);
    if (*batch) return cmd_batch(o);
    if (*plot) return cmd_plot(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MetricError& e) {
    std::cerr << "metric error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
