#pragma once

// Monte Carlo solver: (u, grad u)(t, x) = E[beta(t) (u0, v0)(xi(t))] along
// reversed paths, propagated layer by layer with coefficients frozen at the
// previous layer, or closed over the whole interval by Picard iteration.

#include <cstdint>
#include <functional>
#include <vector>

#include "skt/coeffs.hpp"
#include "skt/model.hpp"

namespace skt {

struct SolverConfig {
  std::size_t npaths = 10000;
  int substeps = 5;
  double dt = 0.025;
  double T = 0.25;
  double picard_tol = 1e-3;
  int picard_max = 10;
  std::uint64_t master_seed = 20240607;
  unsigned workers = 1;
  DriftCorrection sign = DriftCorrection::plus;

  /// Number of layers T / dt; throws Error(InvalidSolverConfig) unless integral.
  std::size_t layers() const;
};

/// Throws Error(InvalidSolverConfig).
void validate_solver_config(const SolverConfig& cfg);

/// Fields at 0, dt, 2 dt, ...
struct FieldTrajectory {
  std::vector<DensityField> fields;

  std::size_t size() const noexcept { return fields.size(); }
  const DensityField& front() const { return fields.front(); }
  const DensityField& back() const { return fields.back(); }
};

/// Per-node standard errors matching a DensityField.
struct FieldErrors {
  std::vector<double> u1, u2, v1, v2;

  const std::vector<double>& u(Species q) const { return q == Species::first ? u1 : u2; }
  const std::vector<double>& v(Species q) const { return q == Species::first ? v1 : v2; }
};

struct PointEstimate {
  EstimatorResult u;
  EstimatorResult v;
};

/// Identifies the noise of one estimate; mixed with the master seed and the
/// path index. The species is deliberately not part of the key.
struct StreamKey {
  std::uint64_t layer = 0;
  std::uint64_t node = 0;
};

/// npaths reversed paths over [0, dt] from x with coefficients frozen at
/// `field`, each carrying the matrix functional; endpoint values come from
/// `field` too.
PointEstimate estimate_point(const Parameters& p, Species q, double x, const DensityField& field,
                             double dt, const SolverConfig& cfg, StreamKey key = {});

struct LayerReport {
  double t = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  std::size_t clips = 0;        // negative u estimates set to 0
  std::size_t clamps = 0;       // out-of-domain interpolations
  std::size_t evaluations = 0;  // interpolations performed
  double max_u_stderr = 0.0;
  /// max over interior nodes of |v from the matrix functional - central difference of u|
  double gradient_mismatch = 0.0;

  double clamp_fraction() const noexcept {
    return evaluations ? static_cast<double>(clamps) / static_cast<double>(evaluations) : 0.0;
  }
};

struct LayerResult {
  DensityField field;
  FieldErrors errors;
  LayerReport report;
};

using ProgressSink = std::function<void(const LayerReport&)>;

/// One layer: every node and species estimated against `field_k`.
LayerResult propagate_layer(const DensityField& field_k, const Parameters& p,
                            const SolverConfig& cfg, std::uint64_t layer = 0);

struct MonteCarloSolution {
  FieldTrajectory trajectory;
  std::vector<FieldErrors> errors;  // errors[0] is all zeros
  std::vector<LayerReport> reports;

  std::size_t total_clips() const noexcept;
  std::size_t total_clamps() const noexcept;
  std::size_t total_evaluations() const noexcept;
};

MonteCarloSolution solve_layered(const DensityField& initial, const Parameters& p,
                                 const SolverConfig& cfg, const ProgressSink& progress = {});

struct PicardResult {
  MonteCarloSolution solution;
  /// Updates applied before the fixed point was confirmed.
  int iterations = 0;
  /// residual_history[k] = sup |u^(k+1) - u^(k)| over layers, nodes, species.
  std::vector<double> residual_history;
  bool converged = false;
};

/// Fixed-point iteration on the coefficient fields. The first iterate holds
/// the initial field at every layer; each update re-estimates every layer
/// over [0, t] with path time theta reading the previous iterate at t - theta
/// (piecewise constant per layer). Noise is shared across iterations.
/// Non-convergence is reported through `converged`, not thrown.
PicardResult solve_picard(const DensityField& initial, const Parameters& p,
                          const SolverConfig& cfg, const ProgressSink& progress = {});

}  // namespace skt
