"""Monte Carlo solver for the SKT cross-diffusion system.

Arrays returned by the solvers are indexed ``[snapshot, node]`` with
snapshots at ``t = 0, dt, ..., T``.
"""

from ._skt import (
    DensityField,
    DriftCorrection,
    GridSpec,
    Parameters,
    Profile,
    RunConfig,
    SktError,
    SolverConfig,
    Species,
    duality_pairing,
    exact_linear,
    fd_admissible_step,
    flow_monotonicity,
    gamma_martingale,
    initial_field,
    load_config,
    parse_config,
    run,
    scenario_defaults,
    solve_fd,
    solve_mc,
    weak_residual_refinement,
)

__all__ = [
    "DensityField",
    "DriftCorrection",
    "GridSpec",
    "Parameters",
    "Profile",
    "RunConfig",
    "SktError",
    "SolverConfig",
    "Species",
    "duality_pairing",
    "exact_linear",
    "fd_admissible_step",
    "flow_monotonicity",
    "gamma_martingale",
    "initial_field",
    "load_config",
    "parse_config",
    "run",
    "scenario_defaults",
    "solve_fd",
    "solve_mc",
    "weak_residual_refinement",
]
