#pragma once

// Euler-Maruyama steps for the position, the scalar and matrix functionals and
// the flow Jacobian, plus whole-path simulation with counter-based noise.

#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "skt/coeffs.hpp"
#include "skt/model.hpp"

namespace skt {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable hash of a key tuple; order matters.
template <typename... Keys>
constexpr std::uint64_t derive_seed(std::uint64_t master, Keys... keys) noexcept {
  std::uint64_t h = mix64(master ^ 0x5851f42d4c957f2dULL);
  ((h = mix64(h + 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(keys))), ...);
  return h;
}

/// Gaussian increments that depend only on (seed, counter). The underlying
/// bits are the SplitMix64 sequence seed + k * golden for k = 1, 2, ...
class NoiseStream {
 public:
  using result_type = std::uint64_t;

  explicit NoiseStream(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return mix64(seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  double normal() { return normal_(*this); }
  /// Increment of a Wiener process over `dtheta`.
  double increment(double dtheta) { return std::sqrt(dtheta) * normal(); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  boost::random::normal_distribution<double> normal_;
};

struct PathState {
  double xi = 0.0;
  double eta = 1.0;
  LowerTri beta = LowerTri::identity();
  double jac = 1.0;
  double theta = 0.0;

  static PathState start(double x) noexcept { return {x, 1.0, LowerTri::identity(), 1.0, 0.0}; }
};

// Single steps. Each touches only its own component; the path clock is
// advanced by simulate_path.

/// xi' = xi + M dW
inline PathState step_forward(PathState s, const PointCoeffs& pc, double /*dtheta*/,
                              double dW) noexcept {
  s.xi += pc.M * dW;
  return s;
}

/// xi' = xi + M gradM dtheta + M dW
inline PathState step_reversed(PathState s, const PointCoeffs& pc, double dtheta,
                               double dW) noexcept {
  s.xi += pc.M * pc.gradM * dtheta + pc.M * dW;
  return s;
}

/// eta' = eta (1 + ctilde dtheta + Ccorr dW)
inline PathState step_eta(PathState s, const PointCoeffs& pc, double dtheta, double dW) noexcept {
  s.eta *= 1.0 + pc.ctilde * dtheta + pc.Ccorr * dW;
  return s;
}

/// Exact solution of dJ = gradM J dW over one step with gradM frozen, so J
/// stays positive.
inline PathState step_jacobian(PathState s, const PointCoeffs& pc, double dtheta,
                               double dW) noexcept {
  s.jac *= std::exp(pc.gradM * dW - 0.5 * pc.gradM * pc.gradM * dtheta);
  return s;
}

/// beta' = (I + drift dtheta + diffusion dW) beta
inline PathState step_beta(PathState s, const PointCoeffs& pc, double dtheta, double dW) noexcept {
  const BetaCoeffs bc = beta_coeffs(pc);
  const LowerTri step{1.0 + bc.drift.a11 * dtheta + bc.diffusion.a11 * dW,
                      bc.drift.a21 * dtheta + bc.diffusion.a21 * dW,
                      1.0 + bc.drift.a22 * dtheta + bc.diffusion.a22 * dW};
  s.beta = step * s.beta;
  return s;
}

enum class Direction { forward, reversed };
enum class Functional { eta, beta, gamma };

/// Coefficient fields for a path, piecewise constant in path time: steps
/// [j * steps_per_segment, (j + 1) * steps_per_segment) read segments[j].
struct CoefficientSchedule {
  std::vector<const FieldTable*> segments;
  int steps_per_segment = 1;

  const FieldTable& at_step(int n) const noexcept {
    const auto j = static_cast<std::size_t>(n / steps_per_segment);
    return *segments[j < segments.size() ? j : segments.size() - 1];
  }
  static CoefficientSchedule frozen(const FieldTable& table, int nsteps) {
    return {{&table}, nsteps > 0 ? nsteps : 1};
  }
};

struct PathRequest {
  Direction direction = Direction::forward;
  Functional functional = Functional::eta;
  double start = 0.0;
  double t = 0.0;
  int nsteps = 1;
  const TestFunction* test = nullptr;  // required for Functional::gamma
  DriftCorrection sign = DriftCorrection::plus;
};

struct PathOutcome {
  PathState state;
  /// Left-endpoint sum of (½M²Δh + c h)(xi) eta J dtheta; gamma only.
  double drift_integral = 0.0;
  std::size_t clamps = 0;
  /// eta h(xi) J at the end of the path; gamma only.
  double gamma = 0.0;
};

/// Runs nsteps Euler steps of size t / nsteps, re-evaluating coefficients at
/// the current position every step. The Jacobian is propagated on forward
/// paths. Throws Error(NonPositiveRadicand | NonFiniteState).
PathOutcome simulate_path(const PathRequest& req, const CoefficientSchedule& schedule,
                          const Parameters& p, Species q, NoiseStream& noise);

PathOutcome simulate_path(const PathRequest& req, const DensityField& field, const Parameters& p,
                          Species q, NoiseStream& noise);

}  // namespace skt
