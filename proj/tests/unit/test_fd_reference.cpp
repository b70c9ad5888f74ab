#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "skt/error.hpp"
#include "skt/fd_reference.hpp"

using namespace skt;

namespace {

Parameters heat(double d) {
  Parameters p;
  p.d1 = p.d2 = d;
  return p;
}

double sup_error_vs_exact(std::size_t n, double dt_fd) {
  const GridSpec g{-8.0, 8.0, n};
  const DensityField f0 =
      field_from_initial(g, Profile::gaussian(0, 1, 1), Profile::gaussian(0, 1, 1));
  const FieldTrajectory traj = fd_solve(f0, heat(0.5), 0.25, FDConfig{dt_fd}, 0.25);
  double err = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    err = std::max(err, std::abs(traj.back().u1[i] - exact_linear({0, 1, 1}, 0.5, 0.0, 0.25, g.node(i))));
  }
  return err;
}

}  // namespace

TEST(FdStep, ConstantFieldUnchanged) {
  const DensityField f =
      field_from_initial({-1, 1, 21}, Profile::constant(2.0), Profile::constant(1.0));
  Parameters p = heat(0.3);
  p.d12 = 0.2;
  const DensityField g = fd_step(f, p, 1e-3);
  EXPECT_EQ(g.u1, f.u1);
  EXPECT_EQ(g.u2, f.u2);
}

TEST(FdStep, CflViolationReportsAdmissibleStep) {
  const DensityField f =
      field_from_initial({-1, 1, 21}, Profile::constant(1.0), Profile::constant(1.0));
  Parameters p = heat(1.0);
  p.d11 = 1.0;
  try {
    fd_step(f, p, 0.01);
    FAIL();
  } catch (const CflViolation& e) {
    EXPECT_EQ(e.code(), ErrorCode::CFLViolation);
    EXPECT_DOUBLE_EQ(e.admissible(), 0.01 / (2.0 * 2.0));
    EXPECT_EQ(e.requested(), 0.01);
  }
}

TEST(FdSolve, ZeroTimeAndZeroData) {
  const DensityField f0 = DensityField::zeros({-1, 1, 21});
  EXPECT_EQ(fd_solve(f0, heat(1), 0.0, FDConfig{1e-3}, 0.1).size(), 1U);
  const FieldTrajectory t = fd_solve(f0, heat(1), 0.1, FDConfig{1e-3}, 0.05);
  ASSERT_EQ(t.size(), 3U);
  for (double u : t.back().u1) EXPECT_EQ(u, 0.0);
}

TEST(FdSolve, SnapshotsAtRequestedTimes) {
  const DensityField f0 =
      field_from_initial({-8, 8, 161}, Profile::gaussian(0, 1, 1), Profile::gaussian(0, 1, 1));
  const FieldTrajectory t = fd_solve(f0, heat(0.5), 0.25, FDConfig{0.004}, 0.025);
  ASSERT_EQ(t.size(), 11U);
  for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(t.fields[k].t, 0.025 * k, 1e-14);
  const FieldTrajectory every = fd_solve(f0, heat(0.5), 0.01, FDConfig{0.002}, 0.0);
  EXPECT_EQ(every.size(), 6U);
}

TEST(FdSolve, PureDiffusionConservesMass) {
  const DensityField f0 =
      field_from_initial({-8, 8, 161}, Profile::gaussian(0, 1, 1), Profile::gaussian(1, 0.7, 2));
  Parameters p = heat(0.5);
  p.d12 = 0.1;
  p.d21 = 0.2;
  const FieldTrajectory t = fd_solve(f0, p, 0.5, FDConfig{0.002}, 0.5);
  const double dx = f0.grid.dx();
  // The reflected second difference telescopes exactly under trapezoid weights.
  EXPECT_NEAR(trapezoid(t.back().u1, dx), trapezoid(f0.u1, dx), 1e-12);
  EXPECT_NEAR(trapezoid(t.back().u2, dx), trapezoid(f0.u2, dx), 1e-12);
}

TEST(FdSolve, SecondOrderConvergenceToHeatKernel) {
  // dt_fd proportional to dx^2, three refinements.
  const double e1 = sup_error_vs_exact(81, 0.008);
  const double e2 = sup_error_vs_exact(161, 0.002);
  const double e3 = sup_error_vs_exact(321, 0.0005);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
  EXPECT_GE(std::log2(e2 / e3), 1.9);
}

TEST(FdSolve, NonNegativeOnCrossDiffusionScenario) {
  Parameters p;
  p.d1 = p.d2 = 0.25;
  p.d11 = p.d22 = 0.05;
  p.d12 = p.d21 = 0.1;
  p.a1 = p.a2 = 0.5;
  p.a11 = p.a12 = p.a21 = p.a22 = 0.25;
  const DensityField f0 = field_from_initial({-8, 8, 161}, Profile::two_bumps(-2, 1, 0.75, 3),
                                             Profile::two_bumps(-1, 2, 0.75, 3));
  const FieldTrajectory t = fd_solve(f0, p, 0.2, FDConfig{0.005}, 0.0);
  for (const auto& f : t.fields) {
    for (std::size_t i = 0; i < f.grid.n; ++i) {
      EXPECT_GE(f.u1[i], 0.0);
      EXPECT_GE(f.u2[i], 0.0);
    }
  }
}

TEST(FdGradientSystem, MatchesDifferencedSolution) {
  Parameters p;
  p.d1 = p.d2 = 0.25;
  p.d11 = p.d22 = 0.05;
  p.d12 = p.d21 = 0.1;
  p.a1 = p.a2 = 0.5;
  p.a11 = p.a12 = p.a21 = p.a22 = 0.25;
  auto mismatch = [&](std::size_t n, double dt) {
    const DensityField f0 = field_from_initial({-8, 8, n}, Profile::gaussian(-0.5, 1, 2),
                                               Profile::gaussian(0.5, 1, 2));
    const DensityField a = fd_solve(f0, p, 0.1, FDConfig{dt}, 0.1).back();
    const DensityField b = fd_solve_gradient_system(f0, p, 0.1, FDConfig{dt}, 0.1).back();
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) m = std::max(m, std::abs(a.v1[i] - b.v1[i]));
    return m;
  };
  const double coarse = mismatch(161, 0.004), fine = mismatch(321, 0.001);
  EXPECT_LT(coarse, 0.05);
  EXPECT_GT(coarse / fine, 3.0);
}

TEST(ExactLinear, Values) {
  const GaussianSpec g{0.0, 1.0, 1.0};
  EXPECT_NEAR(exact_linear(g, 0.5, 0.0, 0.0, 0.3), std::exp(-0.045) / std::sqrt(2 * std::numbers::pi), 1e-15);
  const double expected = std::exp(0.25) / std::sqrt(2.0 * std::numbers::pi * 1.25);
  EXPECT_NEAR(exact_linear(g, 0.5, 1.0, 0.25, 0.0), expected, 1e-15);
}

TEST(ExactLinear, MassIsConserved) {
  std::vector<double> v;
  const GridSpec g{-15.0, 15.0, 3001};
  for (std::size_t i = 0; i < g.n; ++i) v.push_back(exact_linear({0.5, 0.8, 2.0}, 1.0, 0.0, 0.7, g.node(i)));
  EXPECT_NEAR(trapezoid(v, g.dx()), 2.0, 1e-10);
}

TEST(ExactLinear, AgreesWithFdWithGrowth) {
  Parameters p = heat(0.5);
  p.a1 = 1.0;
  const DensityField f0 = field_from_initial({-8, 8, 321}, Profile::gaussian(0, 1, 1),
                                             Profile::gaussian(0, 1, 1));
  const FieldTrajectory t = fd_solve(f0, p, 0.25, FDConfig{0.0005}, 0.25);
  EXPECT_NEAR(t.back().u1[160], exact_linear({0, 1, 1}, 0.5, 1.0, 0.25, 0.0), 2e-4);
}
