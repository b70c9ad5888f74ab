#pragma once

// Executable checks of the identities behind the representation: the weak
// form, the martingale decomposition of eta h(xi) J, order preservation of
// the forward flow, the change-of-variables duality and MC-vs-FD agreement.

#include <string>
#include <utility>
#include <vector>

#include "skt/mc_solver.hpp"
#include "skt/model.hpp"

namespace skt {

struct CheckReport {
  std::string name;
  double statistic = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> details;

  static CheckReport make(std::string name, double statistic, double tolerance,
                          std::vector<std::pair<std::string, double>> details = {});
  /// Recomputes the verdict from (statistic, tolerance).
  bool consistent() const noexcept;
  double detail(const std::string& key, double fallback = 0.0) const;
};

/// Monte Carlo knobs shared by the stochastic checks.
struct CheckConfig {
  std::size_t npaths = 10000;
  int nsteps = 20;
  std::uint64_t master_seed = 7;
  unsigned workers = 1;
  DriftCorrection sign = DriftCorrection::plus;
};

/// ⟨u(T),h⟩ - ⟨u(0),h⟩ - Σ_k (t_{k+1} - t_k) ⟨u(t_k), ½M²Δh + c h⟩ with
/// trapezoid inner products on the grid. Tolerance is `tolerance`.
CheckReport weak_residual(const FieldTrajectory& traj, const Parameters& p,
                          const TestFunction& h, Species q, double tolerance = 0.0);

/// Refinement form of the weak residual: the FD reference is run on `grid`
/// with step dt_fd and again with (dx/2, dt_fd/4), snapshots at every step.
/// Passes when |fine residual| <= |coarse residual| / factor; the statistic is
/// the fine residual and the tolerance |coarse| / factor.
CheckReport weak_residual_refinement(const GridSpec& grid, const ScalarFunction& u1_0,
                                     const ScalarFunction& u2_0, const Parameters& p, double T,
                                     double dt_fd, const TestFunction& h, Species q,
                                     double factor = 3.0);

/// Mean over start points of E[gamma(t)] - h(y) - E[∫(½M²Δh + c h)(xi) eta J].
/// Tolerance is three combined standard errors. Empty `starts` uses five
/// points spread over one width either side of the test function center.
CheckReport gamma_martingale(const DensityField& field, const Parameters& p, Species q,
                             const TestFunction& h, double t, const CheckConfig& cfg,
                             std::vector<double> starts = {});

/// Forward flow from ordered starts under one shared noise per path; the
/// statistic counts order violations plus non-positive Jacobians. Empty
/// `starts` uses 50 points on the middle half of the grid.
CheckReport flow_monotonicity(const DensityField& field, const Parameters& p, Species q, double t,
                              const CheckConfig& cfg, std::vector<double> starts = {});

/// |A - B| with A = ∫ E[eta^ u0(xi^(t))] h(x) dx over reversed paths and
/// B = ∫ u0(y) E[eta h(xi(t)) J] dy over forward paths, coefficients frozen
/// at `field`. Tolerance: 3 combined standard errors plus a quadrature bound.
CheckReport duality_pairing(const DensityField& field, const Parameters& p, Species q,
                            const ScalarFunction& u0, const TestFunction& h, double t,
                            const CheckConfig& cfg);

/// sup over layers, nodes and species of |u_mc - u_fd|. Throws
/// Error(GridMismatch) unless grids and snapshot times agree.
CheckReport compare_mc_fd(const FieldTrajectory& mc, const FieldTrajectory& fd, double tolerance);

}  // namespace skt
