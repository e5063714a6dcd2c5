import numpy as np
import pytest

import diracgs as dg
from diracgs.errors import GridMismatchError
from diracgs.solver import _zero_pad


def test_options_validation():
    with pytest.raises(ValueError):
        dg.SolveOptions(tol_outer=0.0)
    with pytest.raises(ValueError):
        dg.SolveOptions(max_outer=0)
    with pytest.raises(ValueError):
        dg.SolveOptions(starts=0)


def test_initial_guess_is_unit_positive(model8):
    for kind in ("gaussian_bump", "random"):
        w = dg.initial_guess(model8.grid, model8, seed=4, kind=kind)
        assert dg.graph_norm(w, model8.a) == pytest.approx(1.0, rel=1e-10)
        _, wm = dg.project_pm(w, model8.a)
        assert dg.graph_norm(wm, model8.a) <= 1e-10


def test_ground_state_run(solved8, model8):
    res = solved8
    assert res.converged
    assert res.c > 0
    assert res.residual_full <= 1e-6 * max(
        1.0, dg.graph_norm(res.u_star, model8.a))
    assert res.t_check == pytest.approx(1.0, abs=1e-4)
    assert res.alpha_numeric > 0
    assert res.delta_numeric > 0
    assert res.iterations >= 1
    assert res.wall_time > 0
    scale = max(1.0, dg.graph_norm(res.u_star, model8.a))
    assert res.residuals.passes(1e-6 * scale)


def test_trace_is_monotone_to_roundoff(solved8):
    vals = [row.m_value for row in solved8.trace]
    for a, b in zip(vals, vals[1:]):
        assert b <= a + 1e-10 * max(1.0, abs(a))
    assert solved8.trace[0].iter == 0


def test_energy_identity_at_minimizer(solved8, model8):
    u = solved8.u_star
    # on the constraint set the self-derivative vanishes, so the value
    # equals the f-vs-F surplus
    assert dg.derivative_along(u, u, model8) == pytest.approx(0.0, abs=1e-6)
    assert solved8.c - 0.5 * dg.derivative_along(u, u, model8) >= 0


def test_seeds_agree_on_ground_energy(model8):
    opts_a = dg.SolveOptions(tol_outer=1e-6, starts=2, max_outer=400, seed=3)
    opts_b = dg.SolveOptions(tol_outer=1e-6, starts=2, max_outer=400, seed=42)
    ra = dg.minimize_ground_state(model8, opts_a)
    rb = dg.minimize_ground_state(model8, opts_b)
    assert ra.converged and rb.converged
    assert abs(ra.c - rb.c) <= 1e-4 * abs(ra.c)


def test_thread_cap_env(model8, monkeypatch):
    monkeypatch.setenv("NDIRAC_THREADS", "1")
    opts = dg.SolveOptions(tol_outer=1e-4, starts=2, max_outer=60, seed=0)
    res = dg.minimize_ground_state(model8, opts)
    assert res.c > 0


def test_refine_requires_strictly_finer_grid(solved8, model8):
    with pytest.raises(GridMismatchError):
        dg.refine(solved8, model8)
    other_box = dg.default_model(n=16, L=7.0)
    with pytest.raises(GridMismatchError):
        dg.refine(solved8, other_box)


def test_refine_converges_quickly(solved8):
    fine = dg.default_model(n=12, L=6.0)
    res = dg.refine(solved8, fine,
                    dg.SolveOptions(tol_outer=1e-6, max_outer=300, seed=0))
    assert res.converged
    assert res.c > 0
    # warm start should not wander: values stay in the same neighborhood
    assert abs(res.c - solved8.c) < 0.5 * abs(solved8.c)


def test_zero_pad_preserves_negative_subspace():
    # 24 is not a power of two; index arithmetic through fftfreq floats
    # used to truncate the m=7 plane into the m=6 slot, silently mixing
    # the spectral subspaces of the warm start
    coarse = dg.Grid(24, 8.0)
    fine = dg.Grid(32, 8.0)
    rng = np.random.default_rng(9)
    u = dg.random_field(coarse, rng, repr="frequency")
    _, um = dg.project_pm(u, 1.0)
    pad = _zero_pad(dg.to_frequency(um), fine)
    nrm = dg.graph_norm(um, 1.0)
    assert dg.graph_norm(pad, 1.0) == pytest.approx(nrm, rel=1e-13)
    pp, _ = dg.project_pm(pad, 1.0)
    assert dg.graph_norm(pp, 1.0) <= 1e-12 * nrm
