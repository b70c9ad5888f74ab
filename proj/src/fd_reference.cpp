#include "skt/fd_reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "skt/error.hpp"

namespace skt {

namespace {

double diffusivity(const SpeciesRates& r, double u_own, double u_other) {
  return r.d + r.d_own * u_own + r.d_other * u_other;
}

/// Second difference with mirrored ghost nodes (even reflection).
std::vector<double> neumann_laplacian(const std::vector<double>& w, double dx) {
  const std::size_t n = w.size();
  std::vector<double> lap(n);
  const double inv = 1.0 / (dx * dx);
  lap[0] = 2.0 * (w[1] - w[0]) * inv;
  lap[n - 1] = 2.0 * (w[n - 2] - w[n - 1]) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) lap[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv;
  return lap;
}

/// Second difference with odd reflection, for quantities that flip sign
/// across a Neumann wall (gradients and fluxes).
std::vector<double> odd_laplacian(const std::vector<double>& w, double dx) {
  const std::size_t n = w.size();
  std::vector<double> lap(n);
  const double inv = 1.0 / (dx * dx);
  lap[0] = (w[1] - 2.0 * w[0] - w[1]) * inv;
  lap[n - 1] = (-w[n - 2] - 2.0 * w[n - 1] + w[n - 2]) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) lap[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv;
  return lap;
}

void check_cfl(const DensityField& field, const Parameters& p, double dt_fd) {
  if (!(dt_fd > 0.0)) throw Error(ErrorCode::InvalidSolverConfig, "dt_fd must be > 0");
  const double bound = fd_admissible_step(field, p);
  if (dt_fd > bound * (1.0 + 1e-12)) throw CflViolation(dt_fd, bound);
}

void check_finite(const DensityField& f) {
  for (const auto* arr : {&f.u1, &f.u2, &f.v1, &f.v2}) {
    for (double x : *arr) {
      if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteState, "FD field is not finite");
    }
  }
}

/// Advances u of both species; v is left to the caller.
DensityField advance_densities(const DensityField& field, const Parameters& p, double dt_fd) {
  check_cfl(field, p, dt_fd);
  const std::size_t n = field.grid.n;
  const double dx = field.grid.dx();
  DensityField next = field;
  next.t = field.t + dt_fd;
  for (Species q : {Species::first, Species::second}) {
    const SpeciesRates r = rates_for(p, q);
    const auto& u_own = field.u(q);
    const auto& u_other = field.u(other(q));
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = u_own[i] * diffusivity(r, u_own[i], u_other[i]);
    const std::vector<double> lap = neumann_laplacian(w, dx);
    auto& out = next.u(q);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = r.a - r.a_own * u_own[i] - r.a_other * u_other[i];
      out[i] = u_own[i] + dt_fd * (lap[i] + c * u_own[i]);
    }
  }
  return next;
}

template <typename StepFn>
FieldTrajectory integrate(const DensityField& initial, double T, const FDConfig& cfg,
                          double snapshot_dt, StepFn&& step) {
  validate_grid(initial.grid);
  if (!(T >= 0.0)) throw Error(ErrorCode::InvalidSolverConfig, "T must be >= 0");
  if (!(cfg.dt_fd > 0.0)) throw Error(ErrorCode::InvalidSolverConfig, "dt_fd must be > 0");
  FieldTrajectory traj;
  traj.fields.push_back(initial);
  traj.fields.back().t = 0.0;
  if (T == 0.0) return traj;

  const double interval = snapshot_dt > 0.0 ? snapshot_dt : cfg.dt_fd;
  const double ratio = T / interval;
  const auto snapshots = static_cast<std::size_t>(std::llround(ratio));
  if (snapshots < 1 || std::abs(ratio - static_cast<double>(snapshots)) > 1e-9 * ratio) {
    throw Error(ErrorCode::InvalidSolverConfig, "T must be a multiple of the snapshot interval");
  }
  const auto steps =
      static_cast<std::size_t>(std::max(1.0, std::ceil(interval / cfg.dt_fd - 1e-9)));
  const double h = interval / static_cast<double>(steps);

  DensityField current = traj.fields.back();
  for (std::size_t s = 1; s <= snapshots; ++s) {
    for (std::size_t k = 0; k < steps; ++k) current = step(current, h);
    current.t = static_cast<double>(s) * interval;
    traj.fields.push_back(current);
  }
  return traj;
}

}  // namespace

double fd_admissible_step(const DensityField& field, const Parameters& p) {
  double dmax = 0.0;
  for (Species q : {Species::first, Species::second}) {
    const SpeciesRates r = rates_for(p, q);
    for (std::size_t i = 0; i < field.grid.n; ++i) {
      dmax = std::max(dmax, diffusivity(r, field.u(q)[i], field.u(other(q))[i]));
    }
  }
  const double dx = field.grid.dx();
  return dmax > 0.0 ? dx * dx / (2.0 * dmax) : std::numeric_limits<double>::infinity();
}

DensityField fd_step(const DensityField& field, const Parameters& p, double dt_fd) {
  DensityField next = advance_densities(field, p, dt_fd);
  next.v1 = central_gradient(next.u1, next.grid.dx());
  next.v2 = central_gradient(next.u2, next.grid.dx());
  check_finite(next);
  return next;
}

FieldTrajectory fd_solve(const DensityField& initial, const Parameters& p, double T,
                         const FDConfig& cfg, double snapshot_dt) {
  validate_params(p);
  return integrate(initial, T, cfg, snapshot_dt,
                   [&](const DensityField& f, double h) { return fd_step(f, p, h); });
}

FieldTrajectory fd_solve_gradient_system(const DensityField& initial, const Parameters& p,
                                         double T, const FDConfig& cfg, double snapshot_dt) {
  validate_params(p);
  auto step = [&](const DensityField& f, double h) {
    DensityField next = advance_densities(f, p, h);
    const std::size_t n = f.grid.n;
    for (Species q : {Species::first, Species::second}) {
      const SpeciesRates r = rates_for(p, q);
      const auto& u_own = f.u(q);
      const auto& u_other = f.u(other(q));
      const auto& v_own = f.v(q);
      const auto& v_other = f.v(other(q));
      std::vector<double> flux(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double cross = r.d_own * v_own[i] + r.d_other * v_other[i];
        flux[i] = v_own[i] * diffusivity(r, u_own[i], u_other[i]) + u_own[i] * cross;
      }
      const std::vector<double> lap = odd_laplacian(flux, f.grid.dx());
      auto& out = next.v(q);
      for (std::size_t i = 0; i < n; ++i) {
        const double c = r.a - r.a_own * u_own[i] - r.a_other * u_other[i];
        const double grad_c = -r.a_own * v_own[i] - r.a_other * v_other[i];
        out[i] = v_own[i] + h * (lap[i] + u_own[i] * grad_c + c * v_own[i]);
      }
    }
    check_finite(next);
    return next;
  };
  return integrate(initial, T, cfg, snapshot_dt, step);
}

double exact_linear(const GaussianSpec& u0, double d, double alpha, double t, double x) {
  const double var = u0.width * u0.width + 2.0 * d * t;
  const double z = x - u0.center;
  return std::exp(alpha * t) * u0.mass * std::exp(-0.5 * z * z / var) /
         std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace skt
