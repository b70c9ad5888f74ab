#include "skt/mc_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skt/error.hpp"
#include "skt/parallel.hpp"
#include "skt/sde.hpp"

namespace skt {

std::size_t SolverConfig::layers() const {
  const double ratio = T / dt;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::InvalidSolverConfig, "T / dt must be a positive integer");
  }
  return static_cast<std::size_t>(rounded);
}

void validate_solver_config(const SolverConfig& cfg) {
  if (cfg.npaths < 1) throw Error(ErrorCode::InvalidSolverConfig, "npaths must be >= 1");
  if (cfg.substeps < 1) throw Error(ErrorCode::InvalidSolverConfig, "substeps must be >= 1");
  if (!(cfg.dt > 0.0) || !(cfg.dt <= cfg.T * (1.0 + 1e-12))) {
    throw Error(ErrorCode::InvalidSolverConfig, "need 0 < dt <= T");
  }
  if (!(cfg.picard_tol > 0.0)) {
    throw Error(ErrorCode::InvalidSolverConfig, "picard_tol must be > 0");
  }
  if (cfg.picard_max < 1) throw Error(ErrorCode::InvalidSolverConfig, "picard_max must be >= 1");
  (void)cfg.layers();
}

namespace {

struct PointRun {
  PointEstimate estimate;
  std::size_t evaluations = 0;
};

/// Reversed paths from x carrying the matrix functional; endpoint (u0, v0)
/// read from `endpoint`.
PointRun run_point(const Parameters& p, Species q, double x, const CoefficientSchedule& schedule,
                   const FieldTable& endpoint, double t, int nsteps, const SolverConfig& cfg,
                   StreamKey key) {
  RunningStats u_stats;
  RunningStats v_stats;
  std::size_t clamps = 0;
  PathRequest req;
  req.direction = Direction::reversed;
  req.functional = Functional::beta;
  req.start = x;
  req.t = t;
  req.nsteps = nsteps;
  req.sign = cfg.sign;
  for (std::size_t path = 0; path < cfg.npaths; ++path) {
    NoiseStream noise(derive_seed(cfg.master_seed, key.layer, key.node, path));
    const PathOutcome out = simulate_path(req, schedule, p, q, noise);
    clamps += out.clamps;
    const FieldSample end = endpoint.sample(out.state.xi, clamps);
    const LowerTri& b = out.state.beta;
    u_stats.add(b.a11 * end.u(q));
    v_stats.add(b.a21 * end.u(q) + b.a22 * end.v(q));
  }
  PointRun run;
  run.estimate.u = u_stats.result(clamps);
  run.estimate.v = v_stats.result(clamps);
  run.evaluations = cfg.npaths * static_cast<std::size_t>(nsteps + 1);
  return run;
}

FieldErrors zero_errors(std::size_t n) {
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
          std::vector<double>(n, 0.0)};
}

/// Estimates every node and species of the layer at time t_new; `estimate`
/// maps (q, node) to a PointRun.
template <typename EstimateFn>
LayerResult assemble_layer(const GridSpec& grid, double t_new, unsigned workers,
                           EstimateFn&& estimate) {
  const std::size_t n = grid.n;
  std::vector<PointRun> runs(2 * n);
  parallel_for(n, workers, [&](std::size_t i) {
    runs[2 * i] = estimate(Species::first, i);
    runs[2 * i + 1] = estimate(Species::second, i);
  });

  LayerResult out{DensityField::zeros(grid, t_new), zero_errors(n), {}};
  LayerReport& rep = out.report;
  rep.t = t_new;
  rep.u_min = std::numeric_limits<double>::infinity();
  rep.u_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (Species q : {Species::first, Species::second}) {
      const PointRun& r = runs[2 * i + static_cast<std::size_t>(index_of(q))];
      double u = r.estimate.u.mean;
      if (u < 0.0) {
        u = 0.0;
        ++rep.clips;
      }
      out.field.u(q)[i] = u;
      out.field.v(q)[i] = r.estimate.v.mean;
      (q == Species::first ? out.errors.u1 : out.errors.u2)[i] = r.estimate.u.std_error;
      (q == Species::first ? out.errors.v1 : out.errors.v2)[i] = r.estimate.v.std_error;
      rep.clamps += r.estimate.u.clamps;
      rep.evaluations += r.evaluations;
      rep.u_min = std::min(rep.u_min, u);
      rep.u_max = std::max(rep.u_max, u);
      rep.max_u_stderr = std::max(rep.max_u_stderr, r.estimate.u.std_error);
    }
  }
  for (Species q : {Species::first, Species::second}) {
    const std::vector<double> cd = central_gradient(out.field.u(q), grid.dx());
    for (std::size_t i = 1; i + 1 < n; ++i) {
      rep.gradient_mismatch = std::max(rep.gradient_mismatch, std::abs(cd[i] - out.field.v(q)[i]));
    }
  }
  return out;
}

}  // namespace

PointEstimate estimate_point(const Parameters& p, Species q, double x, const DensityField& field,
                             double dt, const SolverConfig& cfg, StreamKey key) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidSolverConfig, "dt must be > 0");
  if (cfg.npaths < 1 || cfg.substeps < 1) {
    throw Error(ErrorCode::InvalidSolverConfig, "npaths and substeps must be >= 1");
  }
  const FieldTable table(field);
  return run_point(p, q, x, CoefficientSchedule::frozen(table, cfg.substeps), table, dt,
                   cfg.substeps, cfg, key)
      .estimate;
}

LayerResult propagate_layer(const DensityField& field_k, const Parameters& p,
                            const SolverConfig& cfg, std::uint64_t layer) {
  validate_params(p);
  const FieldTable table(field_k);
  const CoefficientSchedule schedule = CoefficientSchedule::frozen(table, cfg.substeps);
  const GridSpec& grid = field_k.grid;
  return assemble_layer(grid, field_k.t + cfg.dt, cfg.workers, [&](Species q, std::size_t i) {
    return run_point(p, q, grid.node(i), schedule, table, cfg.dt, cfg.substeps, cfg,
                     {layer, i});
  });
}

std::size_t MonteCarloSolution::total_clips() const noexcept {
  std::size_t s = 0;
  for (const auto& r : reports) s += r.clips;
  return s;
}

std::size_t MonteCarloSolution::total_clamps() const noexcept {
  std::size_t s = 0;
  for (const auto& r : reports) s += r.clamps;
  return s;
}

std::size_t MonteCarloSolution::total_evaluations() const noexcept {
  std::size_t s = 0;
  for (const auto& r : reports) s += r.evaluations;
  return s;
}

namespace {
void check_inputs(const DensityField& initial, const Parameters& p, const SolverConfig& cfg) {
  validate_params(p);
  validate_grid(initial.grid);
  validate_solver_config(cfg);
}

/// Layer times are k * dt exactly, not accumulated sums.
double layer_time(const SolverConfig& cfg, std::size_t k) {
  return static_cast<double>(k) * cfg.dt;
}
}  // namespace

MonteCarloSolution solve_layered(const DensityField& initial, const Parameters& p,
                                 const SolverConfig& cfg, const ProgressSink& progress) {
  check_inputs(initial, p, cfg);
  const std::size_t layers = cfg.layers();
  MonteCarloSolution sol;
  sol.trajectory.fields.reserve(layers + 1);
  sol.trajectory.fields.push_back(initial);
  sol.trajectory.fields.back().t = 0.0;
  sol.errors.push_back(zero_errors(initial.grid.n));
  for (std::size_t k = 0; k < layers; ++k) {
    LayerResult next = propagate_layer(sol.trajectory.fields.back(), p, cfg, k);
    next.field.t = layer_time(cfg, k + 1);
    next.report.t = next.field.t;
    if (progress) progress(next.report);
    sol.reports.push_back(next.report);
    sol.errors.push_back(std::move(next.errors));
    sol.trajectory.fields.push_back(std::move(next.field));
  }
  return sol;
}

PicardResult solve_picard(const DensityField& initial, const Parameters& p,
                          const SolverConfig& cfg, const ProgressSink& progress) {
  check_inputs(initial, p, cfg);
  const std::size_t layers = cfg.layers();
  const GridSpec& grid = initial.grid;

  MonteCarloSolution current;
  for (std::size_t k = 0; k <= layers; ++k) {
    current.trajectory.fields.push_back(initial);
    current.trajectory.fields.back().t = layer_time(cfg, k);
    current.errors.push_back(zero_errors(grid.n));
  }

  PicardResult result;
  const FieldTable endpoint(initial);
  for (int iter = 1; iter <= cfg.picard_max; ++iter) {
    std::vector<FieldTable> tables;
    tables.reserve(layers + 1);
    for (const auto& f : current.trajectory.fields) tables.emplace_back(f);

    MonteCarloSolution next;
    next.trajectory.fields.push_back(current.trajectory.fields.front());
    next.errors.push_back(zero_errors(grid.n));
    for (std::size_t n = 1; n <= layers; ++n) {
      // Path segment j covers real time [t_{n-j-1}, t_{n-j}]; freeze at its start.
      CoefficientSchedule schedule;
      schedule.steps_per_segment = cfg.substeps;
      for (std::size_t j = 0; j < n; ++j) schedule.segments.push_back(&tables[n - j - 1]);
      const double t = layer_time(cfg, n);
      const int nsteps = static_cast<int>(n) * cfg.substeps;
      LayerResult layer =
          assemble_layer(grid, t, cfg.workers, [&](Species q, std::size_t i) {
            return run_point(p, q, grid.node(i), schedule, endpoint, t, nsteps, cfg,
                             {n - 1, i});
          });
      if (progress) progress(layer.report);
      next.reports.push_back(layer.report);
      next.errors.push_back(std::move(layer.errors));
      next.trajectory.fields.push_back(std::move(layer.field));
    }

    double residual = 0.0;
    for (std::size_t n = 1; n <= layers; ++n) {
      for (Species q : {Species::first, Species::second}) {
        const auto& a = next.trajectory.fields[n].u(q);
        const auto& b = current.trajectory.fields[n].u(q);
        for (std::size_t i = 0; i < grid.n; ++i) residual = std::max(residual, std::abs(a[i] - b[i]));
      }
    }
    result.residual_history.push_back(residual);
    current = std::move(next);
    if (residual <= cfg.picard_tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = static_cast<int>(result.residual_history.size()) - 1;
  if (!result.converged) result.iterations = static_cast<int>(result.residual_history.size());
  result.solution = std::move(current);
  return result;
}

}  // namespace skt
