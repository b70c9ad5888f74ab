#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "skt/error.hpp"
#include "skt/sde.hpp"

using namespace skt;

namespace {

PointCoeffs constant_coeffs(double M, double gradM = 0.0, double c = 0.0) {
  PointCoeffs pc;
  pc.M = M;
  pc.gradM = gradM;
  pc.crossV = gradM * M;
  pc.c = c;
  pc.correction = gradM * gradM;
  pc.ctilde = c + pc.correction;
  pc.Ccorr = -gradM;
  return pc;
}

// Field whose coefficients are constant in space: u constant, v constant.
// With v != 0 and cross diffusion the stored gradient gives a constant gradM
// even though u does not vary, which is what the frozen-coefficient oracles need.
DensityField uniform_field(double u1, double u2, double v1, double v2) {
  DensityField f = DensityField::zeros({-40.0, 40.0, 81});
  std::fill(f.u1.begin(), f.u1.end(), u1);
  std::fill(f.u2.begin(), f.u2.end(), u2);
  std::fill(f.v1.begin(), f.v1.end(), v1);
  std::fill(f.v2.begin(), f.v2.end(), v2);
  return f;
}

}  // namespace

TEST(StepForward, Arithmetic) {
  const PathState s = PathState::start(1.0);
  EXPECT_DOUBLE_EQ(step_forward(s, constant_coeffs(1.0), 0.1, 0.3).xi, 1.3);
  EXPECT_EQ(step_forward(s, constant_coeffs(2.0), 0.1, 0.0).xi, 1.0);
}

TEST(StepReversed, Arithmetic) {
  const PathState s = PathState::start(1.0);
  EXPECT_DOUBLE_EQ(step_reversed(s, constant_coeffs(2.0, 0.5), 0.1, 0.0).xi, 1.1);
  EXPECT_EQ(step_reversed(s, constant_coeffs(2.0), 0.1, 0.3).xi,
            step_forward(s, constant_coeffs(2.0), 0.1, 0.3).xi);
}

TEST(StepEta, Arithmetic) {
  PathState s = PathState::start(0.0);
  s.eta = 2.0;
  PointCoeffs pc;
  pc.ctilde = 0.5;
  pc.Ccorr = -1.0;
  EXPECT_DOUBLE_EQ(step_eta(s, pc, 0.1, 0.2).eta, 1.7);
  EXPECT_EQ(step_eta(s, PointCoeffs{}, 0.1, 0.2).eta, 2.0);
}

TEST(StepEta, ExponentialOdeLimit) {
  // d eta = eta dtheta: Euler gives (1 + 1/n)^n -> e.
  for (int n : {1000, 100000}) {
    PathState s = PathState::start(0.0);
    const PointCoeffs pc = constant_coeffs(1.0, 0.0, 1.0);
    for (int k = 0; k < n; ++k) s = step_eta(s, pc, 1.0 / n, 0.0);
    EXPECT_NEAR(s.eta, std::numbers::e, 2.0 / n);
  }
}

TEST(StepJacobian, ConstantFlowKeepsUnitJacobian) {
  PathState s = PathState::start(0.0);
  for (int k = 0; k < 10; ++k) s = step_jacobian(s, constant_coeffs(1.3), 0.1, 0.7);
  EXPECT_EQ(s.jac, 1.0);
}

TEST(StepJacobian, AlwaysPositive) {
  PathState s = PathState::start(0.0);
  for (double dW : {-50.0, -3.0, 0.0, 4.0, 60.0}) {
    s = step_jacobian(s, constant_coeffs(1.0, 5.0), 0.01, dW);
    EXPECT_GT(s.jac, 0.0);
  }
}

TEST(StepBeta, IdentityWithZeroCoefficients) {
  const PathState s = step_beta(PathState::start(0.0), PointCoeffs{1.0}, 0.1, 0.3);
  EXPECT_EQ(s.beta, LowerTri::identity());
}

TEST(StepBeta, SingleStepMatrixArithmetic) {
  // drift = [[0.5,0],[0.1,0.5]], diffusion = 0.
  PointCoeffs pc;
  pc.M = 1.0;
  pc.c = 0.5;
  pc.ctilde = 0.5;
  pc.gradC = 0.1;
  const PathState s = step_beta(PathState::start(0.0), pc, 0.1, 0.0);
  EXPECT_DOUBLE_EQ(s.beta.a11, 1.05);
  EXPECT_DOUBLE_EQ(s.beta.a21, 0.01);
  EXPECT_DOUBLE_EQ(s.beta.a22, 1.05);
}

TEST(StepBeta, DiagonalMatchesEtaWithoutCrossTerms) {
  PointCoeffs pc = constant_coeffs(1.0, 0.0, 0.4);
  PathState a = PathState::start(0.0), b = PathState::start(0.0);
  for (double dW : {0.1, -0.2, 0.05}) {
    a = step_beta(a, pc, 0.01, dW);
    b = step_eta(b, pc, 0.01, dW);
  }
  EXPECT_EQ(a.beta.a11, b.eta);
  EXPECT_EQ(a.beta.a22, b.eta);
  EXPECT_EQ(a.beta.a21, 0.0);
}

TEST(NoiseStream, DeterministicAndCounterBased) {
  NoiseStream a(42), b(42), c(43);
  std::vector<double> xa, xb, xc;
  for (int k = 0; k < 100; ++k) {
    xa.push_back(a.normal());
    xb.push_back(b.normal());
    xc.push_back(c.normal());
  }
  EXPECT_EQ(xa, xb);
  EXPECT_NE(xa, xc);
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
}

TEST(NoiseStream, StandardNormalMoments) {
  NoiseStream n(9);
  RunningStats s, s2;
  for (int k = 0; k < 200000; ++k) {
    const double z = n.normal();
    s.add(z);
    s2.add(z * z);
  }
  EXPECT_LT(std::abs(s.mean()), 3.0 * s.std_error());
  EXPECT_LT(std::abs(s2.mean() - 1.0), 3.0 * s2.std_error());
}

TEST(SimulatePath, SingleStepMatchesComposition) {
  Parameters p;
  p.d1 = 0.3;
  p.d11 = 0.2;
  p.d12 = 0.1;
  p.a1 = 0.5;
  p.a11 = 0.1;
  const DensityField f = field_from_initial(
      {-5, 5, 101}, [](double x) { return std::exp(-x * x); }, [](double x) { return 0.5 * std::exp(-x * x); });
  PathRequest req;
  req.direction = Direction::reversed;
  req.functional = Functional::beta;
  req.start = 0.35;
  req.t = 0.02;
  req.nsteps = 1;
  NoiseStream noise(7);
  const PathOutcome out = simulate_path(req, f, p, Species::first, noise);

  NoiseStream replay(7);
  const double dW = std::sqrt(0.02) * replay.normal();
  std::size_t clamps = 0;
  const PointCoeffs pc =
      coeffs_from_sample(rates_for(p, Species::first), Species::first, FieldTable(f).sample(0.35, clamps));
  PathState s = step_beta(PathState::start(0.35), pc, 0.02, dW);
  s = step_reversed(s, pc, 0.02, dW);
  EXPECT_EQ(out.state.xi, s.xi);
  EXPECT_EQ(out.state.beta, s.beta);
  EXPECT_EQ(out.state.theta, 0.02);
}

TEST(SimulatePath, SameSeedIsBitIdentical) {
  Parameters p;
  p.d12 = 0.3;
  const DensityField f = field_from_initial(
      {-5, 5, 101}, [](double x) { return std::exp(-x * x); }, [](double x) { return std::exp(-x * x); });
  PathRequest req;
  req.functional = Functional::gamma;
  const TestFunction h = make_gaussian_test(0.0, 1.0);
  req.test = &h;
  req.t = 0.1;
  req.nsteps = 10;
  NoiseStream a(5), b(5);
  const PathOutcome x = simulate_path(req, f, p, Species::first, a);
  const PathOutcome y = simulate_path(req, f, p, Species::first, b);
  EXPECT_EQ(x.state.xi, y.state.xi);
  EXPECT_EQ(x.state.jac, y.state.jac);
  EXPECT_EQ(x.gamma, y.gamma);
  EXPECT_EQ(x.drift_integral, y.drift_integral);
}

TEST(SimulatePath, RejectsBadRequests) {
  const DensityField f = DensityField::zeros({-1, 1, 11});
  PathRequest req;
  req.t = 0.0;
  NoiseStream n(1);
  EXPECT_THROW(simulate_path(req, f, Parameters{}, Species::first, n), Error);
  req.t = 0.1;
  req.functional = Functional::gamma;
  EXPECT_THROW(simulate_path(req, f, Parameters{}, Species::first, n), Error);
}

TEST(SimulatePath, NonFiniteStateReported) {
  Parameters p;
  p.a1 = 1e308;
  DensityField f = uniform_field(0.0, 0.0, 0.0, 0.0);
  PathRequest req;
  req.t = 1.0;
  req.nsteps = 10;
  NoiseStream n(1);
  try {
    simulate_path(req, f, p, Species::first, n);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteState);
  }
}

TEST(SimulatePath, BrownianVarianceOracle) {
  // d1 = 2 gives M = 2, so Var(xi(t) - x) = M^2 t = 4 t.
  Parameters p;
  p.d1 = 2.0;
  const DensityField f = uniform_field(0.0, 0.0, 0.0, 0.0);
  PathRequest req;
  req.t = 0.5;
  req.nsteps = 5;
  RunningStats sq;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    NoiseStream n(derive_seed(3, k));
    const double d = simulate_path(req, f, p, Species::first, n).state.xi;
    sq.add(d * d);
  }
  EXPECT_LT(std::abs(sq.mean() - 2.0), 3.0 * sq.std_error());
}

TEST(SimulatePath, ReversedDriftOracle) {
  // Constant u and constant stored gradient: M = sqrt(2(d + d11 u1)), gradM = d11 v1 / M.
  Parameters p;
  p.d1 = 0.5;
  p.d11 = 0.5;
  const DensityField f = uniform_field(1.0, 0.0, 0.8, 0.0);
  const double M = std::sqrt(2.0 * (0.5 + 0.5));
  const double gradM = 0.5 * 0.8 / M;
  PathRequest req;
  req.direction = Direction::reversed;
  req.t = 0.5;
  req.nsteps = 5;
  RunningStats disp;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    NoiseStream n(derive_seed(4, k));
    disp.add(simulate_path(req, f, p, Species::first, n).state.xi);
  }
  EXPECT_LT(std::abs(disp.mean() - M * gradM * 0.5), 3.0 * disp.std_error());
}

TEST(SimulatePath, JacobianIsMeanOneMartingale) {
  Parameters p;
  p.d1 = 0.5;
  p.d11 = 0.5;
  const DensityField f = uniform_field(1.0, 0.0, 1.5, 0.0);
  PathRequest req;
  req.t = 0.5;
  req.nsteps = 5;
  RunningStats jac;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    NoiseStream n(derive_seed(5, k));
    const PathOutcome o = simulate_path(req, f, p, Species::first, n);
    ASSERT_GT(o.state.jac, 0.0);
    jac.add(o.state.jac);
  }
  EXPECT_LT(std::abs(jac.mean() - 1.0), 3.0 * jac.std_error());
}

TEST(SimulatePath, ForwardLawIsGaussian) {
  // Kolmogorov-Smirnov against Normal(x, M^2 t) over 10^4 paths at the 1% level.
  Parameters p;
  p.d1 = 0.5;
  const DensityField f = uniform_field(0.0, 0.0, 0.0, 0.0);
  PathRequest req;
  req.start = 0.3;
  req.t = 0.8;
  req.nsteps = 8;
  std::vector<double> z;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    NoiseStream n(derive_seed(6, k));
    z.push_back((simulate_path(req, f, p, Species::first, n).state.xi - 0.3) / std::sqrt(0.8));
  }
  std::sort(z.begin(), z.end());
  double d = 0.0;
  const double N = static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-z[i] / std::numbers::sqrt2);
    d = std::max({d, std::abs(cdf - i / N), std::abs((i + 1) / N - cdf)});
  }
  EXPECT_LT(d, 1.628 / std::sqrt(N));
}

TEST(SimulatePath, ForwardFlowPreservesOrderOnLinearMField) {
  // M^2/2 = d + d11 u with u linear in x; shared noise across starts.
  Parameters p;
  p.d1 = 0.5;
  p.d11 = 0.2;
  const DensityField f = field_from_initial(
      {-10, 10, 201}, [](double x) { return 2.0 + 0.15 * x; }, [](double) { return 0.0; });
  PathRequest req;
  req.t = 0.05;
  req.nsteps = 10;
  std::size_t violations = 0;
  for (std::uint64_t path = 0; path < 1000; ++path) {
    double prev = -1e300;
    for (int j = 0; j < 50; ++j) {
      req.start = -2.0 + 0.08 * j;
      NoiseStream n(derive_seed(8, path));
      const PathOutcome o = simulate_path(req, f, p, Species::first, n);
      violations += o.state.xi > prev ? 0U : 1U;
      prev = o.state.xi;
    }
  }
  EXPECT_EQ(violations, 0U);
}
