#pragma once

// Run configuration: a flat INI file with sections, layered over the defaults
// of a registered scenario.
//
//   [scenario] name = linear | growth | cross-diffusion | custom
//   [model]    d1 d2 d11 d12 d21 d22 a1 a2 a11 a12 a21 a22
//   [grid]     xmin xmax n
//   [initial]  u1 u2            e.g. gaussian(0,1,1), two-bumps(-2,1,0.75,3)
//   [solver]   npaths substeps dt T mode picard_tol picard_max seed workers
//   [fd]       dt_fd
//   [verify]   checks npaths nsteps t duality_t flow_paths test_centers
//              test_width compare_tolerance
//   [output]   progress
//   [debug]    flip_correction_sign

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skt/fd_reference.hpp"
#include "skt/mc_solver.hpp"
#include "skt/model.hpp"
#include "skt/verify.hpp"

namespace skt::app {

enum class SolveMode { layered, picard };

struct VerifySettings {
  std::vector<std::string> checks;
  CheckConfig mc;
  double t = 0.05;          // gamma martingale and flow interval
  double duality_t = 0.025;
  std::size_t flow_paths = 1000;
  std::vector<double> test_centers{-1.0, 0.0, 1.0};
  double test_width = 1.0;
  double compare_tolerance = 2e-2;
};

struct RunConfig {
  std::string scenario = "custom";
  Parameters params;
  GridSpec grid;
  Profile u1_0 = Profile::constant(0.0);
  Profile u2_0 = Profile::constant(0.0);
  SolverConfig solver;
  SolveMode mode = SolveMode::layered;
  FDConfig fd;
  VerifySettings verify;
  bool progress = false;

  DensityField initial_field() const;
};

/// Names accepted in [scenario] name.
const std::vector<std::string>& registered_scenarios();

/// Defaults of a registered scenario. Throws Error(InvalidConfig).
RunConfig scenario_defaults(const std::string& name);

/// The check names understood by `verify`.
const std::vector<std::string>& known_checks();

/// Parses INI text over the scenario defaults and validates every component.
/// Throws Error(InvalidConfig) or the component's validation error.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Validates every component invariant.
void validate(const RunConfig& cfg);

}  // namespace skt::app
