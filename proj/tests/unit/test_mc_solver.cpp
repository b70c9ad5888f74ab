#include <gtest/gtest.h>

#include <cmath>

#include "skt/error.hpp"
#include "skt/fd_reference.hpp"
#include "skt/mc_solver.hpp"

using namespace skt;

namespace {

DensityField gaussian_field(const GridSpec& g = {-8.0, 8.0, 161}) {
  return field_from_initial(g, Profile::gaussian(0.0, 1.0, 1.0), Profile::gaussian(0.0, 1.0, 1.0));
}

Parameters linear_params() {
  Parameters p;
  p.d1 = 0.5;
  p.d2 = 1.0;
  return p;
}

}  // namespace

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(validate_solver_config(cfg));
  EXPECT_EQ(cfg.layers(), 10U);
  cfg.npaths = 0;
  EXPECT_THROW(validate_solver_config(cfg), Error);
  cfg = {};
  cfg.substeps = 0;
  EXPECT_THROW(validate_solver_config(cfg), Error);
  cfg = {};
  cfg.dt = 0.3;
  EXPECT_THROW(validate_solver_config(cfg), Error);
  cfg = {};
  cfg.dt = 0.03;
  EXPECT_THROW(cfg.layers(), Error);
  cfg = {};
  cfg.picard_tol = 0.0;
  EXPECT_THROW(validate_solver_config(cfg), Error);
}

TEST(EstimatePoint, ZeroTimeIdentity) {
  Parameters p;
  p.d11 = 0.1;
  p.d12 = 0.2;
  const DensityField f = gaussian_field();
  SolverConfig cfg;
  cfg.npaths = 50;
  cfg.substeps = 1;
  const double x = f.grid.node(77);
  const PointEstimate e = estimate_point(p, Species::first, x, f, 1e-20, cfg);
  EXPECT_NEAR(e.u.mean, f.u1[77], 1e-9);
  EXPECT_NEAR(e.v.mean, f.v1[77], 1e-8);
}

TEST(EstimatePoint, ConstantFieldIsFixedExactly) {
  Parameters p;
  p.d11 = 0.3;
  p.d21 = 0.2;
  const DensityField f =
      field_from_initial({-8, 8, 161}, Profile::constant(1.5), Profile::constant(0.5));
  SolverConfig cfg;
  cfg.npaths = 200;
  const PointEstimate e = estimate_point(p, Species::first, 0.3, f, 0.025, cfg);
  EXPECT_EQ(e.u.mean, 1.5);
  EXPECT_EQ(e.u.std_error, 0.0);
  EXPECT_EQ(e.v.mean, 0.0);
}

TEST(EstimatePoint, LinearCaseMatchesHeatKernel) {
  const Parameters p = linear_params();
  const DensityField f = gaussian_field();
  SolverConfig cfg;
  cfg.npaths = 100000;
  for (double x : {-1.0, 0.0, 0.5}) {
    for (Species q : {Species::first, Species::second}) {
      const PointEstimate e = estimate_point(p, q, x, f, 0.025, cfg, {0, 1});
      const double d = q == Species::first ? 0.5 : 1.0;
      const double exact = exact_linear({0.0, 1.0, 1.0}, d, 0.0, 0.025, x);
      EXPECT_LE(std::abs(e.u.mean - exact), std::max(3.0 * e.u.std_error, 2e-3));
    }
  }
}

TEST(PropagateLayer, ZeroFieldStaysZero) {
  const DensityField f = DensityField::zeros({-8, 8, 161});
  SolverConfig cfg;
  cfg.npaths = 20;
  const LayerResult r = propagate_layer(f, linear_params(), cfg);
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    EXPECT_EQ(r.field.u1[i], 0.0);
    EXPECT_EQ(r.field.u2[i], 0.0);
  }
  EXPECT_EQ(r.report.clips, 0U);
  EXPECT_DOUBLE_EQ(r.field.t, 0.025);
}

TEST(PropagateLayer, HeatEquationConservesMass) {
  Parameters p;
  p.d1 = p.d2 = 0.5;
  const DensityField f = gaussian_field();
  SolverConfig cfg;
  cfg.npaths = 20000;
  const LayerResult r = propagate_layer(f, p, cfg);
  const double dx = f.grid.dx();
  double var = 0.0;
  for (double se : r.errors.u1) var += se * se * dx * dx;
  EXPECT_LE(std::abs(trapezoid(r.field.u1, dx) - trapezoid(f.u1, dx)),
            3.0 * std::sqrt(var) + 1e-12);
}

TEST(PropagateLayer, GrowthScalesMass) {
  Parameters p = linear_params();
  p.a1 = 1.0;
  const DensityField f = gaussian_field();
  SolverConfig cfg;
  cfg.npaths = 20000;
  const LayerResult r = propagate_layer(f, p, cfg);
  const double dx = f.grid.dx();
  double var = 0.0;
  for (double se : r.errors.u1) var += se * se * dx * dx;
  const double expected = std::exp(0.025) * trapezoid(f.u1, dx);
  EXPECT_LE(std::abs(trapezoid(r.field.u1, dx) - expected), 3.0 * std::sqrt(var) + 1e-4);
}

TEST(SolveLayered, TrajectoryShapeAndDeterminism) {
  const DensityField f = gaussian_field({-8, 8, 41});
  SolverConfig cfg;
  cfg.npaths = 100;
  cfg.T = 0.05;
  const MonteCarloSolution a = solve_layered(f, linear_params(), cfg);
  const MonteCarloSolution b = solve_layered(f, linear_params(), cfg);
  ASSERT_EQ(a.trajectory.size(), 3U);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a.trajectory.fields[k].u1, b.trajectory.fields[k].u1);
    EXPECT_EQ(a.trajectory.fields[k].v2, b.trajectory.fields[k].v2);
    EXPECT_NEAR(a.trajectory.fields[k].t, 0.025 * k, 1e-15);
  }
}

TEST(SolveLayered, SingleLayerEqualsPropagateLayer) {
  const DensityField f = gaussian_field({-8, 8, 41});
  SolverConfig cfg;
  cfg.npaths = 100;
  cfg.T = cfg.dt;
  const MonteCarloSolution s = solve_layered(f, linear_params(), cfg);
  const LayerResult r = propagate_layer(f, linear_params(), cfg, 0);
  ASSERT_EQ(s.trajectory.size(), 2U);
  EXPECT_EQ(s.trajectory.back().u1, r.field.u1);
}

TEST(SolveLayered, WorkerCountDoesNotChangeResults) {
  Parameters p;
  p.d1 = p.d2 = 0.25;
  p.d12 = p.d21 = 0.1;
  p.a1 = p.a2 = 0.5;
  p.a11 = p.a22 = 0.25;
  const DensityField f = field_from_initial({-8, 8, 41}, Profile::two_bumps(-2, 1, 0.75, 3),
                                            Profile::two_bumps(-1, 2, 0.75, 3));
  SolverConfig cfg;
  cfg.npaths = 200;
  cfg.T = 0.05;
  const MonteCarloSolution one = solve_layered(f, p, cfg);
  cfg.workers = 4;
  const MonteCarloSolution four = solve_layered(f, p, cfg);
  for (std::size_t k = 0; k < one.trajectory.size(); ++k) {
    EXPECT_EQ(one.trajectory.fields[k].u1, four.trajectory.fields[k].u1);
    EXPECT_EQ(one.trajectory.fields[k].u2, four.trajectory.fields[k].u2);
    EXPECT_EQ(one.trajectory.fields[k].v1, four.trajectory.fields[k].v1);
    EXPECT_EQ(one.errors[k].u1, four.errors[k].u1);
  }
}

TEST(SolveLayered, SpeciesSwapSwapsFieldsExactly) {
  Parameters p;
  p.d1 = 0.3;
  p.d2 = 0.2;
  p.d11 = 0.05;
  p.d12 = 0.1;
  p.d21 = 0.02;
  p.a1 = 0.5;
  p.a12 = 0.3;
  const Profile a = Profile::gaussian(-1, 0.8, 1.0), b = Profile::gaussian(1, 1.1, 2.0);
  const GridSpec g{-8, 8, 41};
  SolverConfig cfg;
  cfg.npaths = 100;
  cfg.T = 0.05;
  const MonteCarloSolution s = solve_layered(field_from_initial(g, a, b), p, cfg);
  const MonteCarloSolution t = solve_layered(field_from_initial(g, b, a), swapped(p), cfg);
  for (std::size_t k = 0; k < s.trajectory.size(); ++k) {
    EXPECT_EQ(s.trajectory.fields[k].u1, t.trajectory.fields[k].u2);
    EXPECT_EQ(s.trajectory.fields[k].u2, t.trajectory.fields[k].u1);
    EXPECT_EQ(s.trajectory.fields[k].v1, t.trajectory.fields[k].v2);
  }
}

TEST(SolveLayered, ProgressReportedPerLayer) {
  const DensityField f = gaussian_field({-8, 8, 41});
  SolverConfig cfg;
  cfg.npaths = 10;
  cfg.T = 0.1;
  std::vector<double> times;
  solve_layered(f, linear_params(), cfg, [&](const LayerReport& r) { times.push_back(r.t); });
  ASSERT_EQ(times.size(), 4U);
  EXPECT_NEAR(times.back(), 0.1, 1e-15);
}

TEST(SolvePicard, LinearCaseConvergesInOneIteration) {
  const DensityField f = gaussian_field({-8, 8, 41});
  SolverConfig cfg;
  cfg.npaths = 200;
  cfg.T = 0.05;
  const PicardResult r = solve_picard(f, linear_params(), cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
}

TEST(SolvePicard, ZeroDataConvergesImmediately) {
  Parameters p;
  p.d11 = 0.2;
  const DensityField f = DensityField::zeros({-8, 8, 41});
  SolverConfig cfg;
  cfg.npaths = 20;
  cfg.T = 0.05;
  const PicardResult r = solve_picard(f, p, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  for (const auto& field : r.solution.trajectory.fields) {
    for (double u : field.u1) EXPECT_EQ(u, 0.0);
  }
}

TEST(SolvePicard, CrossDiffusionResidualDecreases) {
  Parameters p;
  p.d1 = p.d2 = 0.25;
  p.d11 = p.d22 = 0.05;
  p.d12 = p.d21 = 0.1;
  p.a1 = p.a2 = 0.5;
  p.a11 = p.a12 = p.a21 = p.a22 = 0.25;
  const DensityField f = field_from_initial({-8, 8, 81}, Profile::two_bumps(-2, 1, 0.75, 3),
                                            Profile::two_bumps(-1, 2, 0.75, 3));
  SolverConfig cfg;
  cfg.npaths = 2000;
  cfg.T = 0.05;
  cfg.picard_tol = 1e-6;
  cfg.picard_max = 4;
  const PicardResult r = solve_picard(f, p, cfg);
  ASSERT_GE(r.residual_history.size(), 2U);
  for (std::size_t k = 1; k < r.residual_history.size(); ++k) {
    EXPECT_LT(r.residual_history[k], r.residual_history[k - 1]);
  }
  // Common random numbers make the iteration contract to a fixed point.
  EXPECT_LT(r.residual_history.back(), 1e-3);
}

TEST(SolvePicard, NonConvergenceIsReported) {
  Parameters p;
  p.d11 = 0.3;
  p.d12 = 0.3;
  const DensityField f = field_from_initial({-8, 8, 41}, Profile::gaussian(0, 0.8, 2),
                                            Profile::gaussian(0, 0.8, 2));
  SolverConfig cfg;
  cfg.npaths = 200;
  cfg.T = 0.05;
  cfg.picard_tol = 1e-15;
  cfg.picard_max = 1;
  const PicardResult r = solve_picard(f, p, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.residual_history.size(), 1U);
}
