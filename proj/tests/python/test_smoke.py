import json

import numpy as np
import pytest

import sktmc


def linear_setup(n=81):
    params = sktmc.Parameters(d1=0.5, d2=1.0)
    grid = sktmc.GridSpec(-8.0, 8.0, n)
    g = sktmc.Profile.gaussian(0.0, 1.0, 1.0)
    return params, grid, sktmc.initial_field(grid, g, g)


def test_mc_matches_heat_kernel():
    params, grid, f0 = linear_setup(161)
    cfg = sktmc.SolverConfig(npaths=20000, dt=0.025, T=0.05)
    sol = sktmc.solve_mc(f0, params, cfg)
    assert sol["u1"].shape == (3, grid.n)
    np.testing.assert_allclose(sol["t"], [0.0, 0.025, 0.05])
    exact = sktmc.exact_linear(0.0, 1.0, 1.0, 0.5, 0.0, 0.05, sol["x"])
    err = np.abs(sol["u1"][-1] - exact)
    assert np.all(err <= np.maximum(4 * sol["u1_stderr"][-1], 2e-3))
    assert sol["clips"] == 0


def test_mc_is_deterministic_and_worker_independent():
    params, _, f0 = linear_setup(41)
    a = sktmc.solve_mc(f0, params, sktmc.SolverConfig(npaths=200, T=0.05, workers=1))
    b = sktmc.solve_mc(f0, params, sktmc.SolverConfig(npaths=200, T=0.05, workers=3))
    np.testing.assert_array_equal(a["u2"], b["u2"])
    np.testing.assert_array_equal(a["v1"], b["v1"])


def test_picard_linear_converges_in_one_update():
    params, _, f0 = linear_setup(41)
    r = sktmc.solve_mc(f0, params, sktmc.SolverConfig(npaths=200, T=0.05), mode="picard")
    assert r["picard_converged"]
    assert r["picard_iterations"] == 1


def test_fd_conserves_mass_and_reports_cfl():
    params, grid, f0 = linear_setup()
    step = sktmc.fd_admissible_step(f0, params)
    sol = sktmc.solve_fd(f0, params, 0.1, step, 0.05)
    mass = np.trapezoid(sol["u1"], sol["x"], axis=1)
    np.testing.assert_allclose(mass, mass[0], rtol=1e-10)
    with pytest.raises(sktmc.SktError) as info:
        sktmc.solve_fd(f0, params, 0.1, 2 * step, 0.05)
    assert info.value.code == "CFLViolation"


def test_invalid_input_raises_with_code():
    with pytest.raises(sktmc.SktError) as info:
        sktmc.Parameters(d1=0.0)
    assert info.value.code == "NonPositiveDiffusion"
    with pytest.raises(sktmc.SktError):
        sktmc.GridSpec(0.0, 1.0, 2)


def test_checks_return_reports():
    cfg = sktmc.scenario_defaults("cross-diffusion")
    field = cfg.initial_field()
    r = sktmc.gamma_martingale(field, cfg.params, sktmc.Species.first, npaths=2000)
    assert set(r) == {"name", "statistic", "tolerance", "pass", "details"}
    assert r["pass"] == (abs(r["statistic"]) <= r["tolerance"])
    flow = sktmc.flow_monotonicity(field, cfg.params, sktmc.Species.second, npaths=50)
    assert flow["pass"] and flow["statistic"] == 0.0


def test_cli_run_in_process(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[scenario]\nname = linear\n[grid]\nn = 41\n[solver]\nnpaths = 50\nT = 0.05\n")
    assert sktmc.run("solve-mc", ini, tmp_path / "out") == 0
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["rows"] == 3 * 41
    assert sktmc.run("solve-mc", tmp_path / "missing.ini", tmp_path / "x") == 1
