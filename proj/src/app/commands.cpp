#include "skt/app/commands.hpp"

#include <chrono>
#include <fstream>
#include <ostream>

#include "skt/app/output.hpp"
#include "skt/error.hpp"
#include "skt/fd_reference.hpp"

namespace skt::app {

RunConfig resolve_config(const CommandOptions& opts) {
  RunConfig cfg = load_config(opts.config);
  if (opts.seed) cfg.solver.master_seed = *opts.seed;
  if (opts.workers) {
    cfg.solver.workers = *opts.workers;
    cfg.verify.mc.workers = *opts.workers;
  }
  if (opts.mode) cfg.mode = *opts.mode;
  if (opts.progress) cfg.progress = true;
  if (opts.flip_correction_sign) {
    cfg.solver.sign = DriftCorrection::minus;
    cfg.verify.mc.sign = DriftCorrection::minus;
  }
  validate(cfg);
  return cfg;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs `body` on a resolved config and maps failures onto exit codes.
template <class Body>
int guarded(const CommandOptions& opts, std::ostream& log, Body&& body) {
  RunConfig cfg;
  try {
    cfg = resolve_config(opts);
    std::filesystem::create_directories(opts.out);
  } catch (const Error& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    return body(cfg);
  } catch (const CflViolation& e) {
    log << "numerical failure: " << e.what() << " (admissible step " << format_double(e.admissible())
        << ")\n";
    return kExitNumerical;
  } catch (const Error& e) {
    log << "numerical failure [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    log << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

class ProgressFile {
 public:
  ProgressFile(bool enabled, const std::filesystem::path& path) {
    if (enabled) out_.open(path, std::ios::binary);
  }

  ProgressSink sink() {
    if (!out_.is_open()) return {};
    return [this](const LayerReport& r) { out_ << layer_report_to_json(r).dump() << '\n' << std::flush; };
  }

 private:
  std::ofstream out_;
};

struct McRun {
  MonteCarloSolution solution;
  std::optional<PicardResult> picard;
};

McRun run_mc(const RunConfig& cfg, const ProgressSink& progress) {
  const DensityField initial = cfg.initial_field();
  McRun run;
  if (cfg.mode == SolveMode::picard) {
    run.picard = solve_picard(initial, cfg.params, cfg.solver, progress);
    run.solution = run.picard->solution;
  } else {
    run.solution = solve_layered(initial, cfg.params, cfg.solver, progress);
  }
  return run;
}

FieldTrajectory run_fd(const RunConfig& cfg) {
  return fd_solve(cfg.initial_field(), cfg.params, cfg.solver.T, cfg.fd, cfg.solver.dt);
}

nlohmann::json summary_base(const char* command, const RunConfig& cfg, const FieldTrajectory& traj,
                             double runtime) {
  return {{"command", command},
          {"scenario", cfg.scenario},
          {"seed", cfg.solver.master_seed},
          {"workers", cfg.solver.workers},
          {"runtime_seconds", runtime},
          {"snapshots", traj.size()},
          {"nodes", cfg.grid.n},
          {"rows", traj.size() * cfg.grid.n},
          {"config", config_to_json(cfg)}};
}

nlohmann::json counters(const MonteCarloSolution& s) {
  double worst_se = 0.0;
  for (const auto& r : s.reports) worst_se = std::max(worst_se, r.max_u_stderr);
  const std::size_t evals = s.total_evaluations();
  return {{"clips", s.total_clips()},
          {"clamps", s.total_clamps()},
          {"evaluations", evals},
          {"clamp_fraction",
           evals ? static_cast<double>(s.total_clamps()) / static_cast<double>(evals) : 0.0},
          {"max_u_stderr", worst_se}};
}

}  // namespace

std::vector<CheckReport> run_checks(const RunConfig& cfg) {
  const VerifySettings& v = cfg.verify;
  auto wants = [&](const char* name) {
    return std::find(v.checks.begin(), v.checks.end(), name) != v.checks.end();
  };
  std::vector<CheckReport> reports;
  if (v.checks.empty()) return reports;

  const DensityField initial = cfg.initial_field();
  std::vector<TestFunction> tests;
  for (double c : v.test_centers) tests.push_back(make_gaussian_test(c, v.test_width));
  const Species species[] = {Species::first, Species::second};
  const Profile* profiles[] = {&cfg.u1_0, &cfg.u2_0};

  if (wants("weak_residual")) {
    for (Species q : species) {
      reports.push_back(weak_residual_refinement(cfg.grid, cfg.u1_0, cfg.u2_0, cfg.params,
                                                 cfg.solver.T, cfg.fd.dt_fd, tests.front(), q));
    }
  }
  if (wants("gamma_martingale")) {
    for (const auto& h : tests) {
      for (Species q : species) {
        reports.push_back(gamma_martingale(initial, cfg.params, q, h, v.t, v.mc));
      }
    }
  }
  if (wants("flow_monotonicity")) {
    CheckConfig flow = v.mc;
    flow.npaths = v.flow_paths;
    for (Species q : species) {
      reports.push_back(flow_monotonicity(initial, cfg.params, q, v.t, flow));
    }
  }
  if (wants("duality_pairing")) {
    for (Species q : species) {
      reports.push_back(duality_pairing(initial, cfg.params, q, *profiles[index_of(q)],
                                        tests.front(), v.duality_t, v.mc));
    }
  }
  if (wants("compare_mc_fd")) {
    const MonteCarloSolution mc = solve_layered(initial, cfg.params, cfg.solver);
    reports.push_back(compare_mc_fd(mc.trajectory, run_fd(cfg), v.compare_tolerance));
  }
  return reports;
}

int cmd_solve_mc(const CommandOptions& opts, std::ostream& log) {
  return guarded(opts, log, [&](const RunConfig& cfg) {
    const auto start = Clock::now();
    ProgressFile progress(cfg.progress, opts.out / "progress.jsonl");
    const McRun run = run_mc(cfg, progress.sink());
    const double runtime = seconds_since(start);
    write_trajectory_csv(opts.out / "trajectory.csv", run.solution.trajectory);
    nlohmann::json summary = summary_base("solve-mc", cfg, run.solution.trajectory, runtime);
    summary["counters"] = counters(run.solution);
    if (run.picard) {
      summary["picard"] = {{"iterations", run.picard->iterations},
                           {"converged", run.picard->converged},
                           {"residual_history", run.picard->residual_history}};
    }
    write_json(opts.out / "summary.json", summary);
    if (run.picard && !run.picard->converged) {
      log << "numerical failure [" << to_string(ErrorCode::NoConvergence)
          << "]: Picard iteration did not reach the tolerance\n";
      return kExitNumerical;
    }
    log << "solve-mc: wrote " << run.solution.trajectory.size() * cfg.grid.n << " rows in "
        << format_double(runtime) << " s\n";
    return kExitOk;
  });
}

int cmd_solve_fd(const CommandOptions& opts, std::ostream& log) {
  return guarded(opts, log, [&](const RunConfig& cfg) {
    const auto start = Clock::now();
    const FieldTrajectory traj = run_fd(cfg);
    const double runtime = seconds_since(start);
    write_trajectory_csv(opts.out / "trajectory.csv", traj);
    nlohmann::json summary = summary_base("solve-fd", cfg, traj, runtime);
    summary["admissible_step"] = fd_admissible_step(traj.front(), cfg.params);
    write_json(opts.out / "summary.json", summary);
    log << "solve-fd: wrote " << traj.size() * cfg.grid.n << " rows in " << format_double(runtime)
        << " s\n";
    return kExitOk;
  });
}

int cmd_verify(const CommandOptions& opts, std::ostream& log) {
  return guarded(opts, log, [&](const RunConfig& cfg) {
    std::vector<CheckReport> reports;
    int code = kExitOk;
    try {
      reports = run_checks(cfg);
    } catch (...) {
      write_json(opts.out / "report.json", checks_to_json(reports));
      throw;
    }
    write_json(opts.out / "report.json", checks_to_json(reports));
    for (const auto& r : reports) {
      log << (r.pass ? "PASS " : "FAIL ") << r.name << " statistic=" << format_double(r.statistic)
          << " tolerance=" << format_double(r.tolerance) << '\n';
      if (!r.pass) code = kExitCheck;
    }
    return code;
  });
}

int cmd_compare(const CommandOptions& opts, std::ostream& log) {
  return guarded(opts, log, [&](const RunConfig& cfg) {
    const McRun run = run_mc(cfg, {});
    const FieldTrajectory fd = run_fd(cfg);
    write_trajectory_csv(opts.out / "trajectory_mc.csv", run.solution.trajectory);
    write_trajectory_csv(opts.out / "trajectory_fd.csv", fd);
    const CheckReport r = compare_mc_fd(run.solution.trajectory, fd, cfg.verify.compare_tolerance);
    write_json(opts.out / "report.json", checks_to_json({r}));
    log << (r.pass ? "PASS " : "FAIL ") << r.name << " statistic=" << format_double(r.statistic)
        << " tolerance=" << format_double(r.tolerance) << '\n';
    return r.pass ? kExitOk : kExitCheck;
  });
}

}  // namespace skt::app
