#pragma once

// Deterministic reference: explicit finite differences for
//   u_t = Δ(u (d_q + d_q1 u1 + d_q2 u2)) + u (a_q - a_q1 u1 - a_q2 u2)
// with homogeneous Neumann ends, and the closed-form heat-kernel solution of
// the decoupled linear case. Shares no numerics with the Monte Carlo path.

#include "skt/mc_solver.hpp"
#include "skt/model.hpp"

namespace skt {

struct FDConfig {
  double dt_fd = 1e-3;
};

/// Largest stable explicit step dx^2 / (2 max diffusivity) for `field`.
double fd_admissible_step(const DensityField& field, const Parameters& p);

/// One explicit step. Throws CflViolation with the admissible step.
DensityField fd_step(const DensityField& field, const Parameters& p, double dt_fd);

/// Iterated fd_step from t = 0 to T with snapshots every `snapshot_dt`
/// (each interval split into equal steps no larger than dt_fd). A
/// non-positive snapshot_dt snapshots every step of exactly dt_fd.
FieldTrajectory fd_solve(const DensityField& initial, const Parameters& p, double T,
                         const FDConfig& cfg, double snapshot_dt);

/// Same scheme for u, but v advanced by the differentiated system
///   v_t = Δ(v D + u (d_q1 v1 + d_q2 v2)) + u grad c + c v
/// instead of being recomputed from u. Diagnostic only.
FieldTrajectory fd_solve_gradient_system(const DensityField& initial, const Parameters& p,
                                         double T, const FDConfig& cfg, double snapshot_dt);

struct GaussianSpec {
  double center = 0.0;
  double width = 1.0;
  double mass = 1.0;
};

/// exp(alpha t) * mass * Normal(x; center, width^2 + 2 d t): Gaussian data
/// under u_t = d Δu + alpha u.
double exact_linear(const GaussianSpec& u0, double d, double alpha, double t, double x);

}  // namespace skt
