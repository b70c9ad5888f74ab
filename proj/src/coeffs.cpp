#include "skt/coeffs.hpp"

#include <sstream>

namespace skt {

void throw_non_positive_radicand(double radicand) {
  std::ostringstream os;
  os << "d_q + d_q1 u1 + d_q2 u2 = " << radicand << " is not positive";
  throw Error(ErrorCode::NonPositiveRadicand, os.str());
}

double m_coeff(const Parameters& p, Species q, double u1, double u2) {
  const FieldSample s{u1, u2, 0.0, 0.0};
  return coeffs_from_sample(rates_for(p, q), q, s).M;
}

double grad_m(const Parameters& p, Species q, double u1, double u2, double v1, double v2) {
  return coeffs_from_sample(rates_for(p, q), q, FieldSample{u1, u2, v1, v2}).gradM;
}

double c_coeff(const Parameters& p, Species q, double u1, double u2) noexcept {
  const SpeciesRates r = rates_for(p, q);
  const FieldSample s{u1, u2, 0.0, 0.0};
  return r.a - r.a_own * s.u(q) - r.a_other * s.u(other(q));
}

double grad_c(const Parameters& p, Species q, double v1, double v2) noexcept {
  const SpeciesRates r = rates_for(p, q);
  const FieldSample s{0.0, 0.0, v1, v2};
  return -r.a_own * s.v(q) - r.a_other * s.v(other(q));
}

PointCoeffs point_coeffs(const Parameters& p, Species q, const DensityField& field, double x,
                         std::size_t& clamps, DriftCorrection sign) {
  return coeffs_from_sample(rates_for(p, q), q, interpolate(field, x, clamps), sign);
}

PointCoeffs point_coeffs(const Parameters& p, Species q, const DensityField& field, double x,
                         DriftCorrection sign) {
  std::size_t ignored = 0;
  return point_coeffs(p, q, field, x, ignored, sign);
}

}  // namespace skt
