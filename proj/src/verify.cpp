#include "skt/verify.hpp"

#include <algorithm>
#include <cmath>

#include "skt/error.hpp"
#include "skt/fd_reference.hpp"
#include "skt/parallel.hpp"
#include "skt/sde.hpp"

namespace skt {

CheckReport CheckReport::make(std::string name, double statistic, double tolerance,
                              std::vector<std::pair<std::string, double>> details) {
  CheckReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.tolerance = tolerance;
  r.pass = std::abs(statistic) <= tolerance;
  r.details = std::move(details);
  return r;
}

bool CheckReport::consistent() const noexcept {
  return pass == (std::abs(statistic) <= tolerance);
}

double CheckReport::detail(const std::string& key, double fallback) const {
  for (const auto& [k, v] : details) {
    if (k == key) return v;
  }
  return fallback;
}

namespace {

// Stream tags keep verification noise disjoint from solver noise.
constexpr std::uint64_t kGammaTag = 0x67616d6d61ULL;
constexpr std::uint64_t kFlowTag = 0x666c6f77ULL;
constexpr std::uint64_t kReversedTag = 0x72657673ULL;
constexpr std::uint64_t kForwardTag = 0x66777264ULL;

double inner(const std::vector<double>& a, const std::vector<double>& b, double dx) {
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  return trapezoid(prod, dx);
}

std::vector<double> trapezoid_weights(const GridSpec& g) {
  std::vector<double> w(g.n, g.dx());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

}  // namespace

CheckReport weak_residual(const FieldTrajectory& traj, const Parameters& p,
                          const TestFunction& h, Species q, double tolerance) {
  if (traj.size() < 2) return CheckReport::make("weak_residual", 0.0, tolerance);
  const GridSpec& g = traj.front().grid;
  const double dx = g.dx();
  const SpeciesRates r = rates_for(p, q);
  std::vector<double> hv(g.n), lap(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    hv[i] = h.h(g.node(i));
    lap[i] = h.lap(g.node(i));
  }
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const DensityField& f = traj.fields[k];
    std::vector<double> dual(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
      const double u_own = f.u(q)[i], u_other = f.u(other(q))[i];
      const double half_m2 = r.d + r.d_own * u_own + r.d_other * u_other;
      const double c = r.a - r.a_own * u_own - r.a_other * u_other;
      dual[i] = half_m2 * lap[i] + c * hv[i];
    }
    integral += (traj.fields[k + 1].t - f.t) * inner(f.u(q), dual, dx);
  }
  const double start = inner(traj.front().u(q), hv, dx);
  const double end = inner(traj.back().u(q), hv, dx);
  const double stat = end - start - integral;
  return CheckReport::make("weak_residual", stat, tolerance,
                           {{"pairing_start", start}, {"pairing_end", end}, {"integral", integral},
                            {"species", static_cast<double>(q)}});
}

CheckReport weak_residual_refinement(const GridSpec& grid, const ScalarFunction& u1_0,
                                     const ScalarFunction& u2_0, const Parameters& p, double T,
                                     double dt_fd, const TestFunction& h, Species q,
                                     double factor) {
  const GridSpec fine_grid{grid.xmin, grid.xmax, 2 * (grid.n - 1) + 1};
  const auto coarse_traj =
      fd_solve(field_from_initial(grid, u1_0, u2_0), p, T, FDConfig{dt_fd}, 0.0);
  const auto fine_traj =
      fd_solve(field_from_initial(fine_grid, u1_0, u2_0), p, T, FDConfig{dt_fd / 4.0}, 0.0);
  const double coarse = weak_residual(coarse_traj, p, h, q).statistic;
  const double fine = weak_residual(fine_traj, p, h, q).statistic;
  const double ratio = fine != 0.0 ? std::abs(coarse / fine) : INFINITY;
  return CheckReport::make("weak_residual", fine, std::abs(coarse) / factor,
                           {{"coarse", coarse}, {"fine", fine}, {"ratio", ratio},
                            {"species", static_cast<double>(static_cast<int>(q))},
                            {"test_center", h.center}});
}

CheckReport gamma_martingale(const DensityField& field, const Parameters& p, Species q,
                             const TestFunction& h, double t, const CheckConfig& cfg,
                             std::vector<double> starts) {
  if (starts.empty()) {
    for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) starts.push_back(h.center + s * h.width);
  }
  const FieldTable table(field);
  const CoefficientSchedule schedule = CoefficientSchedule::frozen(table, cfg.nsteps);
  PathRequest req;
  req.direction = Direction::forward;
  req.functional = Functional::gamma;
  req.t = t;
  req.nsteps = cfg.nsteps;
  req.test = &h;
  req.sign = cfg.sign;

  struct PerStart {
    RunningStats stats;
    std::size_t clamps = 0;
    std::size_t nonpositive_jac = 0;
  };
  std::vector<PerStart> results(starts.size());
  parallel_for(starts.size(), cfg.workers, [&](std::size_t j) {
    PathRequest local = req;
    local.start = starts[j];
    const double h0 = h.h(starts[j]);
    PerStart& out = results[j];
    for (std::size_t path = 0; path < cfg.npaths; ++path) {
      NoiseStream noise(derive_seed(cfg.master_seed, kGammaTag, j, path));
      const PathOutcome o = simulate_path(local, schedule, p, q, noise);
      out.clamps += o.clamps;
      out.nonpositive_jac += o.state.jac > 0.0 ? 0U : 1U;
      out.stats.add(o.gamma - h0 - o.drift_integral);
    }
  });

  double mean = 0.0, var = 0.0;
  std::size_t clamps = 0, bad_jac = 0;
  for (const auto& r : results) {
    mean += r.stats.mean();
    var += r.stats.std_error() * r.stats.std_error();
    clamps += r.clamps;
    bad_jac += r.nonpositive_jac;
  }
  const auto m = static_cast<double>(starts.size());
  mean /= m;
  const double se = std::sqrt(var) / m;
  // Rounding floor so that a zero-length interval is not judged on noise of 1 ulp.
  const double tol = 3.0 * se + 1e-12;
  return CheckReport::make("gamma_martingale", mean, tol,
                           {{"std_error", se},
                            {"species", static_cast<double>(q)},
                            {"test_center", h.center},
                            {"test_width", h.width},
                            {"t", t},
                            {"paths_per_start", static_cast<double>(cfg.npaths)},
                            {"starts", m},
                            {"clamps", static_cast<double>(clamps)},
                            {"nonpositive_jacobians", static_cast<double>(bad_jac)}});
}

CheckReport flow_monotonicity(const DensityField& field, const Parameters& p, Species q, double t,
                              const CheckConfig& cfg, std::vector<double> starts) {
  const GridSpec& g = field.grid;
  if (starts.empty()) {
    const double a = g.xmin + 0.25 * (g.xmax - g.xmin);
    const double b = g.xmax - 0.25 * (g.xmax - g.xmin);
    for (int i = 0; i < 50; ++i) starts.push_back(a + (b - a) * i / 49.0);
  }
  std::sort(starts.begin(), starts.end());
  const FieldTable table(field);
  const CoefficientSchedule schedule = CoefficientSchedule::frozen(table, cfg.nsteps);
  PathRequest req;
  req.direction = Direction::forward;
  req.functional = Functional::eta;
  req.t = t;
  req.nsteps = cfg.nsteps;
  req.sign = cfg.sign;

  std::vector<std::size_t> violations(cfg.npaths, 0), bad_jac(cfg.npaths, 0);
  parallel_for(cfg.npaths, cfg.workers, [&](std::size_t path) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, kFlowTag, path);
    double previous = 0.0;
    for (std::size_t k = 0; k < starts.size(); ++k) {
      PathRequest local = req;
      local.start = starts[k];
      NoiseStream noise(seed);
      const PathOutcome o = simulate_path(local, schedule, p, q, noise);
      if (!(o.state.jac > 0.0)) ++bad_jac[path];
      if (k > 0 && !(o.state.xi > previous)) ++violations[path];
      previous = o.state.xi;
    }
  });
  double v = 0.0, j = 0.0;
  for (std::size_t i = 0; i < cfg.npaths; ++i) {
    v += static_cast<double>(violations[i]);
    j += static_cast<double>(bad_jac[i]);
  }
  return CheckReport::make("flow_monotonicity", v + j, 0.0,
                           {{"order_violations", v},
                            {"nonpositive_jacobians", j},
                            {"paths", static_cast<double>(cfg.npaths)},
                            {"starts", static_cast<double>(starts.size())},
                            {"species", static_cast<double>(q)},
                            {"t", t}});
}

CheckReport duality_pairing(const DensityField& field, const Parameters& p, Species q,
                            const ScalarFunction& u0, const TestFunction& h, double t,
                            const CheckConfig& cfg) {
  const GridSpec& g = field.grid;
  const std::vector<double> w = trapezoid_weights(g);
  const FieldTable table(field);
  const CoefficientSchedule schedule = CoefficientSchedule::frozen(table, cfg.nsteps);
  constexpr double kNegligible = 1e-13;

  struct NodeResult {
    double a_term = 0.0, a_var = 0.0, b_term = 0.0, b_var = 0.0;
  };
  std::vector<NodeResult> nodes(g.n);
  parallel_for(g.n, cfg.workers, [&](std::size_t i) {
    const double x = g.node(i);
    NodeResult& out = nodes[i];
    PathRequest req;
    req.start = x;
    req.t = t;
    req.nsteps = cfg.nsteps;
    req.sign = cfg.sign;
    const double hx = h.h(x);
    if (std::abs(hx) > kNegligible) {
      req.direction = Direction::reversed;
      req.functional = Functional::eta;
      RunningStats s;
      for (std::size_t path = 0; path < cfg.npaths; ++path) {
        NoiseStream noise(derive_seed(cfg.master_seed, kReversedTag, i, path));
        const PathOutcome o = simulate_path(req, schedule, p, q, noise);
        s.add(o.state.eta * u0(o.state.xi));
      }
      out.a_term = w[i] * hx * s.mean();
      out.a_var = std::pow(w[i] * hx * s.std_error(), 2);
    }
    const double ux = u0(x);
    if (std::abs(ux) > kNegligible) {
      req.direction = Direction::forward;
      req.functional = Functional::gamma;
      req.test = &h;
      RunningStats s;
      for (std::size_t path = 0; path < cfg.npaths; ++path) {
        NoiseStream noise(derive_seed(cfg.master_seed, kForwardTag, i, path));
        const PathOutcome o = simulate_path(req, schedule, p, q, noise);
        s.add(o.gamma);
      }
      out.b_term = w[i] * ux * s.mean();
      out.b_var = std::pow(w[i] * ux * s.std_error(), 2);
    }
  });
  double a = 0.0, b = 0.0, var = 0.0;
  for (const auto& n : nodes) {
    a += n.a_term;
    b += n.b_term;
    var += n.a_var + n.b_var;
  }
  // Trapezoid error proxy: the t = 0 pairing on the grid against a grid of half spacing.
  auto pairing0 = [&](std::size_t n) {
    const double dx = (g.xmax - g.xmin) / static_cast<double>(n - 1);
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.xmin + static_cast<double>(i) * dx;
      vals[i] = u0(x) * h.h(x);
    }
    return trapezoid(vals, dx);
  };
  const double quad = std::abs(pairing0(g.n) - pairing0(2 * g.n - 1));
  const double se = std::sqrt(var);
  return CheckReport::make("duality_pairing", a - b, 3.0 * se + quad,
                           {{"reversed_side", a},
                            {"forward_side", b},
                            {"std_error", se},
                            {"quadrature_bound", quad},
                            {"species", static_cast<double>(q)},
                            {"t", t}});
}

CheckReport compare_mc_fd(const FieldTrajectory& mc, const FieldTrajectory& fd, double tolerance) {
  if (mc.size() != fd.size() || mc.size() == 0) {
    throw Error(ErrorCode::GridMismatch, "trajectories have different numbers of snapshots");
  }
  double worst = 0.0, worst_t = 0.0, worst_x = 0.0;
  for (std::size_t k = 0; k < mc.size(); ++k) {
    const DensityField& a = mc.fields[k];
    const DensityField& b = fd.fields[k];
    if (!(a.grid == b.grid)) throw Error(ErrorCode::GridMismatch, "grids differ");
    if (std::abs(a.t - b.t) > 1e-9 * std::max(1.0, std::abs(a.t))) {
      throw Error(ErrorCode::GridMismatch, "snapshot times differ");
    }
    for (Species q : {Species::first, Species::second}) {
      for (std::size_t i = 0; i < a.grid.n; ++i) {
        const double d = std::abs(a.u(q)[i] - b.u(q)[i]);
        if (d > worst) {
          worst = d;
          worst_t = a.t;
          worst_x = a.grid.node(i);
        }
      }
    }
  }
  return CheckReport::make("compare_mc_fd", worst, tolerance,
                           {{"worst_t", worst_t}, {"worst_x", worst_x}});
}

}  // namespace skt
