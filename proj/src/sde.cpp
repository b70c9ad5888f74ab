#include "skt/sde.hpp"

#include <cmath>

#include "skt/error.hpp"

namespace skt {

namespace {

bool finite_state(const PathState& s) noexcept {
  return std::isfinite(s.xi) && std::isfinite(s.eta) && std::isfinite(s.beta.a11) &&
         std::isfinite(s.beta.a21) && std::isfinite(s.beta.a22) && std::isfinite(s.jac);
}

}  // namespace

namespace {

template <Direction D, Functional F>
PathOutcome run_path(const PathRequest& req, const CoefficientSchedule& schedule,
                     const SpeciesRates& rates, Species q, NoiseStream& noise) {
  const double dtheta = req.t / req.nsteps;
  const double sqrt_dtheta = std::sqrt(dtheta);
  PathOutcome out;
  PathState s = PathState::start(req.start);
  for (int n = 0; n < req.nsteps; ++n) {
    const FieldSample sample = schedule.at_step(n).sample(s.xi, out.clamps);
    const PointCoeffs pc = coeffs_from_sample(rates, q, sample, req.sign);
    if constexpr (F == Functional::gamma) {
      const TestFunction& h = *req.test;
      const double generator = 0.5 * pc.M * pc.M * h.lap(s.xi) + pc.c * h.h(s.xi);
      out.drift_integral += generator * s.eta * s.jac * dtheta;
    }
    const double dW = sqrt_dtheta * noise.normal();
    if constexpr (F == Functional::beta) {
      s = step_beta(s, pc, dtheta, dW);
    } else {
      s = step_eta(s, pc, dtheta, dW);
    }
    if constexpr (D == Direction::forward) {
      s = step_jacobian(s, pc, dtheta, dW);
      s = step_forward(s, pc, dtheta, dW);
    } else {
      s = step_reversed(s, pc, dtheta, dW);
    }
  }
  s.theta = req.t;
  if (!finite_state(s) || !std::isfinite(out.drift_integral)) {
    throw Error(ErrorCode::NonFiniteState, "path state left the finite range");
  }
  if constexpr (F == Functional::gamma) out.gamma = s.eta * req.test->h(s.xi) * s.jac;
  out.state = s;
  return out;
}

template <Direction D>
PathOutcome dispatch(const PathRequest& req, const CoefficientSchedule& schedule,
                     const SpeciesRates& rates, Species q, NoiseStream& noise) {
  switch (req.functional) {
    case Functional::eta: return run_path<D, Functional::eta>(req, schedule, rates, q, noise);
    case Functional::beta: return run_path<D, Functional::beta>(req, schedule, rates, q, noise);
    case Functional::gamma: break;
  }
  return run_path<D, Functional::gamma>(req, schedule, rates, q, noise);
}

}  // namespace

PathOutcome simulate_path(const PathRequest& req, const CoefficientSchedule& schedule,
                          const Parameters& p, Species q, NoiseStream& noise) {
  if (!(req.t > 0.0) || req.nsteps < 1) {
    throw Error(ErrorCode::InvalidSolverConfig, "simulate_path needs t > 0 and nsteps >= 1");
  }
  if (req.functional == Functional::gamma && req.test == nullptr) {
    throw Error(ErrorCode::InvalidSolverConfig, "gamma functional needs a test function");
  }
  const SpeciesRates rates = rates_for(p, q);
  if (req.direction == Direction::forward) {
    return dispatch<Direction::forward>(req, schedule, rates, q, noise);
  }
  return dispatch<Direction::reversed>(req, schedule, rates, q, noise);
}

PathOutcome simulate_path(const PathRequest& req, const DensityField& field, const Parameters& p,
                          Species q, NoiseStream& noise) {
  const FieldTable table(field);
  return simulate_path(req, CoefficientSchedule::frozen(table, req.nsteps), p, q, noise);
}

}  // namespace skt
