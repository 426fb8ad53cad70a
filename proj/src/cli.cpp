#include "raceway/cli.hpp"

#include "raceway/config.hpp"
#include "raceway/io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iterator>
#include <optional>

namespace raceway {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out;
  std::optional<Index> snapshot_stride;
  std::string grid = "4x4";
  int threads = 1;
};

std::optional<std::pair<int, int>> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) return std::nullopt;
  int a = 0, b = 0;
  const char* p = s.data();
  const auto r1 = std::from_chars(p, p + x, a);
  const auto r2 = std::from_chars(p + x + 1, p + s.size(), b);
  if (r1.ec != std::errc() || r1.ptr != p + x || r2.ec != std::errc() || r2.ptr != p + s.size()) {
    return std::nullopt;
  }
  if (a < 1 || b < 1) return std::nullopt;
  return std::make_pair(a, b);
}

RunConfig resolve(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.out.empty()) cfg.output.directory = o.out;
  if (o.snapshot_stride) cfg.output.snapshot_stride = *o.snapshot_stride;
  validate(cfg);
  return cfg;
}

fs::path prepare_output(const RunConfig& cfg) {
  const fs::path dir(cfg.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error(fmt::format("cannot create output directory '{}': {}",
                                         dir.string(), ec.message()));
  }
  write_text((dir / "resolved.cfg").string(), format_config(cfg));
  return dir;
}

/// Runs one simulation and writes timeseries.csv, report.csv and the snapshots.
ObjectiveReport simulate_and_write(const Mesh& mesh, const RunConfig& cfg, const Controls& x,
                                   const fs::path& dir) {
  const Index stride = cfg.output.snapshot_stride;
  const Index n_steps = step_count(cfg.scenario.objective.horizon, cfg.scenario.hydro.dt);
  StepObserver observer;
  if (stride > 0) {
    observer = [&](Index step, const FlowState& flow, const SpeciesState& species) {
      if (step % stride == 0 || step == n_steps) {
        write_snapshot((dir / fmt::format("snapshot_{}.dat", step)).string(), mesh, flow,
                       species, step);
      }
    };
  }
  SimulationResult res = simulate(mesh, cfg.scenario, x, observer);
  write_text((dir / "timeseries.csv").string(), timeseries_csv(res.report.timeseries));
  write_text((dir / "report.csv").string(), report_csv({res.report}));
  return res.report;
}

void print_report(const ObjectiveReport& r) {
  fmt::print("H={:.6g} omega={:.6g} j_raw={:.8g} j_tilde={:.8g} mean_A={:.8g}\n",
             r.controls.height, r.controls.omega, r.j_raw, r.j_tilde, r.final_mean_A);
  fmt::print("vel_integral={:.8g} oxy_min_integral={:.8g} penalty_vel={:.8g} penalty_oxy={:.8g}\n",
             r.velocity_integral, r.oxygen_min_integral, r.penalty_velocity, r.penalty_oxygen);
  if (r.clipping_defects > 0) {
    fmt::print("warning: {} steps clipped more than the tolerated mass (max ratio {:.3g})\n",
               r.clipping_defects, r.max_clip_ratio);
  }
}

int cmd_simulate(const Options& o) {
  const RunConfig cfg = resolve(o);
  const Mesh mesh = build_mesh(cfg);
  const fs::path dir = prepare_output(cfg);
  print_report(simulate_and_write(mesh, cfg, cfg.controls(), dir));
  return 0;
}

int cmd_optimize(const Options& o) {
  const RunConfig cfg = resolve(o);
  const Mesh mesh = build_mesh(cfg);
  const fs::path dir = prepare_output(cfg);
  const RacewayOptimum opt =
      optimize_raceway(mesh, cfg.scenario, cfg.optimizer.bounds, cfg.optimizer.start,
                       cfg.optimizer.nelder_mead, o.threads, cfg.optimizer.bound_weight);
  write_text((dir / "trace.csv").string(), trace_csv(trace_rows(opt, cfg.optimizer.bounds)));
  std::vector<ObjectiveReport> evals;
  for (const RacewayEvaluation& ev : opt.evaluations) evals.push_back(ev.report);
  write_text((dir / "evaluations.csv").string(), report_csv(evals));
  fmt::print("{} iterations, {} objective evaluations, stop: {}\n",
             opt.search.trace.back().iteration, opt.evaluations.size(), opt.search.stop_reason);
  print_report(simulate_and_write(mesh, cfg, opt.best, dir));
  return 0;
}

int cmd_reactor(const Options& o) {
  const RunConfig cfg = resolve(o);
  const fs::path dir = prepare_output(cfg);
  ReactorState s0;
  s0.values = cfg.scenario.initial;
  const auto traj = integrate(s0, cfg.scenario.bio, cfg.scenario.forcings, cfg.reactor.depth,
                              cfg.reactor.dt, cfg.reactor.steps);
  write_text((dir / "reactor.csv").string(), reactor_csv(traj));
  const ReactorState& last = traj.back();
  fmt::print("t={:.6g} A={:.8g} O={:.8g}\n", last.time, last.values[kA], last.values[kO]);
  return 0;
}

int cmd_sweep(const Options& o, std::pair<int, int> grid) {
  const RunConfig cfg = resolve(o);
  const Mesh mesh = build_mesh(cfg);
  const fs::path dir = prepare_output(cfg);
  const ControlBounds& b = cfg.optimizer.bounds;
  auto axis = [](double lo, double hi, int n, int i) {
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  std::vector<Vector2> points;
  for (int i = 0; i < grid.first; ++i) {
    for (int j = 0; j < grid.second; ++j) {
      points.emplace_back(axis(b.h_min, b.h_max, grid.first, i),
                          axis(b.w_min, b.w_max, grid.second, j));
    }
  }
  ObjectiveEvaluator evaluator(mesh, cfg.scenario, b, o.threads);
  evaluator.evaluate(points);
  std::vector<ObjectiveReport> rows;
  for (const Vector2& p : points) rows.push_back(evaluator.lookup(p)->report);
  write_text((dir / "sweep.csv").string(), report_csv(rows));
  const auto best = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& c) {
    return a.j_tilde < c.j_tilde;
  });
  fmt::print("{} points; best H={:.6g} omega={:.6g} j_tilde={:.8g}\n", rows.size(),
             best->controls.height, best->controls.omega, best->j_tilde);
  return 0;
}

int cmd_info(const Options& o) {
  const RunConfig cfg = resolve(o);
  const Mesh mesh = build_mesh(cfg);
  const RacewayGeometry& g = cfg.geometry;
  fmt::print("{}\n", mesh.summary());
  fmt::print("plan area: {:.10g} m^2 (exact {:.10g})\n", mesh.plan_cell_areas().sum(),
             plan_area(g));
  fmt::print("centerline length: {:.10g} m (exact {:.10g})\n", mesh.centerline_length(),
             centerline_length(g));
  const FlowState rest = rest_state(mesh, cfg.initial_height, cfg.scenario.hydro.gravity);
  fmt::print("water volume at H={}: {:.10g} m^3\n", cfg.initial_height,
             water_volume(mesh, rest.surface_height));
  fmt::print("paddle region cells (centers): {}\n",
             paddle_region(cfg.scenario.paddle, g, mesh, rest.surface_height).size());
  fmt::print("steps: {} of dt={} s\n",
             step_count(cfg.scenario.objective.horizon, cfg.scenario.hydro.dt),
             cfg.scenario.hydro.dt);
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Raceway pond simulation and (H, omega) optimization", "raceway"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Options o;

  auto add_common = [&o](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "configuration file");
    if (config_required) c->required();
    c->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides output.directory)");
    sub->add_option_function<Index>(
           "--snapshot-stride", [&o](const Index& v) { o.snapshot_stride = v; },
           "write a snapshot every N steps (0: none)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", o.threads, "concurrent objective evaluations")
        ->check(CLI::Range(1, 1024));
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "run one (H, omega) evaluation");
  add_common(simulate_cmd, true);
  auto* optimize_cmd = app.add_subcommand("optimize", "Nelder-Mead search over (H, omega)");
  add_common(optimize_cmd, true);
  auto* reactor_cmd = app.add_subcommand("reactor", "well-mixed 0-D reaction model");
  add_common(reactor_cmd, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a rectangular (H, omega) grid");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--grid", o.grid, "grid size AxB (H points x omega points)")
      ->check([](const std::string& s) {
        return parse_grid(s) ? std::string() : std::string("expected AxB with A, B >= 1");
      });
  auto* info_cmd = app.add_subcommand("info", "print mesh and geometry diagnostics");
  add_common(info_cmd, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(o);
    if (*optimize_cmd) return cmd_optimize(o);
    if (*reactor_cmd) return cmd_reactor(o);
    if (*sweep_cmd) return cmd_sweep(o, *parse_grid(o.grid));
    if (*info_cmd) return cmd_info(o);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace raceway
