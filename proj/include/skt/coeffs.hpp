#pragma once

// Coefficient algebra of the stochastic system for one species at one point.
//
//   M      = sqrt(2 (d_q + d_q1 u1 + d_q2 u2))      diffusion amplitude
//   gradM  = (d_q1 v1 + d_q2 v2) / M                 chain rule through v
//   c      = a_q - a_q1 u1 - a_q2 u2                 reaction rate
//   gradC  = -a_q1 v1 - a_q2 v2
//   ctilde = c + gradM^2,  Ccorr = -gradM            functional coefficients
//
// ½M² equals the diffusivity of the divergence-form equation, so the generator
// ½M²Δ pairs with Δ(u D) under integration by parts.

#include <cmath>
#include <cstddef>

#include "skt/error.hpp"
#include "skt/model.hpp"

namespace skt {

/// Sign of the |gradM|^2 term in ctilde. `minus` exists only to show that the
/// verification suite rejects it.
enum class DriftCorrection { plus, minus };

struct PointCoeffs {
  double M = 0.0;
  double gradM = 0.0;
  double c = 0.0;
  double gradC = 0.0;
  double ctilde = 0.0;
  double Ccorr = 0.0;
  double crossV = 0.0;      // d_q1 v1 + d_q2 v2
  double correction = 0.0;  // ctilde - c, i.e. +gradM^2 (or -gradM^2 under the mutation)
};

/// Lower-triangular 2x2 matrix [[a11, 0], [a21, a22]].
struct LowerTri {
  double a11 = 0.0, a21 = 0.0, a22 = 0.0;

  static constexpr LowerTri identity() noexcept { return {1.0, 0.0, 1.0}; }
  static constexpr double a12() noexcept { return 0.0; }
  friend bool operator==(const LowerTri&, const LowerTri&) = default;
};

inline LowerTri operator*(const LowerTri& a, const LowerTri& b) noexcept {
  return {a.a11 * b.a11, a.a21 * b.a11 + a.a22 * b.a21, a.a22 * b.a22};
}

struct BetaCoeffs {
  LowerTri drift;
  LowerTri diffusion;
};

double m_coeff(const Parameters& p, Species q, double u1, double u2);
double grad_m(const Parameters& p, Species q, double u1, double u2, double v1, double v2);
double c_coeff(const Parameters& p, Species q, double u1, double u2) noexcept;
double grad_c(const Parameters& p, Species q, double v1, double v2) noexcept;

[[noreturn]] void throw_non_positive_radicand(double radicand);

/// Hot-path evaluation from already interpolated values.
inline PointCoeffs coeffs_from_sample(const SpeciesRates& r, Species q, const FieldSample& s,
                                      DriftCorrection sign = DriftCorrection::plus) {
  const double u_own = s.u(q), u_other = s.u(other(q));
  const double v_own = s.v(q), v_other = s.v(other(q));
  const double radicand = r.d + r.d_own * u_own + r.d_other * u_other;
  if (!(radicand > 0.0)) throw_non_positive_radicand(radicand);
  PointCoeffs pc;
  pc.M = std::sqrt(2.0 * radicand);
  pc.crossV = r.d_own * v_own + r.d_other * v_other;
  pc.gradM = pc.crossV / pc.M;
  pc.c = r.a - r.a_own * u_own - r.a_other * u_other;
  pc.gradC = -r.a_own * v_own - r.a_other * v_other;
  const double g2 = pc.gradM * pc.gradM;
  pc.correction = sign == DriftCorrection::plus ? g2 : -g2;
  pc.ctilde = pc.c + pc.correction;
  pc.Ccorr = -pc.gradM;
  return pc;
}

/// Coefficients at position x of `field`; out-of-domain lookups bump `clamps`.
PointCoeffs point_coeffs(const Parameters& p, Species q, const DensityField& field, double x,
                         std::size_t& clamps, DriftCorrection sign = DriftCorrection::plus);
PointCoeffs point_coeffs(const Parameters& p, Species q, const DensityField& field, double x,
                         DriftCorrection sign = DriftCorrection::plus);

/// Matrix coefficients of the (u, grad u) functional:
///   drift     = [[ctilde, 0], [gradC + gradM^2, ctilde]]
///   diffusion = [[-gradM, 0], [-gradM, crossV/M - gradM]]
/// The (2,1) drift entry follows the same sign convention as ctilde.
inline BetaCoeffs beta_coeffs(const PointCoeffs& pc) noexcept {
  return {{pc.ctilde, pc.gradC + pc.correction, pc.ctilde},
          {pc.Ccorr, pc.Ccorr, pc.crossV / pc.M + pc.Ccorr}};
}

}  // namespace skt
