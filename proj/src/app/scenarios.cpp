#include "skt/app/config.hpp"
#include "skt/error.hpp"

namespace skt::app {

const std::vector<std::string>& registered_scenarios() {
  static const std::vector<std::string> names{"linear", "growth", "cross-diffusion", "custom"};
  return names;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"weak_residual", "gamma_martingale",
                                              "flow_monotonicity", "duality_pairing",
                                              "compare_mc_fd"};
  return names;
}

namespace {

RunConfig base() {
  RunConfig cfg;
  cfg.grid = {-8.0, 8.0, 161};
  cfg.solver.npaths = 100000;
  cfg.solver.substeps = 5;
  cfg.solver.dt = 0.025;
  cfg.solver.T = 0.25;
  cfg.fd.dt_fd = 0.0025;
  cfg.verify.checks = known_checks();
  cfg.verify.mc.npaths = 100000;
  cfg.verify.mc.nsteps = 20;
  return cfg;
}

}  // namespace

RunConfig scenario_defaults(const std::string& name) {
  RunConfig cfg = base();
  cfg.scenario = name;
  if (name == "linear" || name == "growth") {
    cfg.params = Parameters{};
    cfg.params.d1 = 0.5;
    cfg.params.d2 = 1.0;
    if (name == "growth") cfg.params.a1 = 1.0;
    cfg.u1_0 = Profile::gaussian(0.0, 1.0, 1.0);
    cfg.u2_0 = Profile::gaussian(0.0, 1.0, 1.0);
    cfg.fd.dt_fd = 0.002;
    cfg.verify.compare_tolerance = 5e-3;
    return cfg;
  }
  if (name == "cross-diffusion") {
    Parameters& p = cfg.params;
    p.d1 = p.d2 = 0.25;
    p.d11 = p.d22 = 0.05;
    p.d12 = p.d21 = 0.1;
    p.a1 = p.a2 = 0.5;
    p.a11 = p.a12 = p.a21 = p.a22 = 0.25;
    cfg.u1_0 = Profile::two_bumps(-2.0, 1.0, 0.75, 3.0);
    cfg.u2_0 = Profile::two_bumps(-1.0, 2.0, 0.75, 3.0);
    cfg.solver.T = 0.2;
    cfg.fd.dt_fd = 0.005;
    cfg.verify.test_centers = {-1.0, 0.0, 1.0};
    cfg.verify.test_width = 3.0;
    cfg.verify.compare_tolerance = 2e-2;
    return cfg;
  }
  if (name == "custom") return cfg;
  throw Error(ErrorCode::InvalidConfig, "unknown scenario '" + name + "'");
}

}  // namespace skt::app
