import numpy as np
import numpy.testing as npt
import pytest

try:
    from hypothesis import given, settings, strategies as st
    HAVE_HYPOTHESIS = True
except ImportError:
    HAVE_HYPOTHESIS = False

import diracgs as dg
from diracgs.errors import ModelValidationError

import oracles


def test_power_nonlinearity_tables():
    nl = dg.Nonlinearity(p=2.5)
    s = np.array([0.0, 0.5, 1.0, 4.0])
    npt.assert_allclose(nl.f_arr(s), s ** 0.5)
    npt.assert_allclose(nl.F_arr(s), s ** 2.5 / 2.5)
    assert dg.f_eval(nl, 2.0) == pytest.approx(2.0 ** 0.5)
    assert dg.F_eval(nl, 2.0) == pytest.approx(2.0 ** 2.5 / 2.5)
    with pytest.raises(ValueError):
        dg.f_eval(nl, -1.0)
    with pytest.raises(ValueError):
        dg.F_eval(nl, -1.0)


def test_custom_nonlinearity_routes_through_callables():
    f = lambda s: np.log1p(s)
    F = lambda s: 0.5 * (s * s - 1) * np.log1p(s) - s * s / 4 + s / 2
    nl = dg.Nonlinearity(kind="custom", p=2.5, f_fn=f, F_fn=F)
    s = np.linspace(0.0, 3.0, 7)
    npt.assert_allclose(nl.f_arr(s), f(s))
    npt.assert_allclose(nl.F_arr(s), F(s))
    # F really is the antiderivative of t f(t)
    h = 1e-6
    mid = 1.3
    fd = (F(np.array([mid + h])) - F(np.array([mid - h]))) / (2 * h)
    assert fd[0] == pytest.approx(mid * f(np.array([mid]))[0], rel=1e-8)


def test_cq_constant_against_brute_force(rng):
    for _ in range(8):
        q = float(rng.uniform(2.05, 2.95))
        V = float(rng.uniform(0.05, 5.0))
        closed = dg.cq_constant(q) * V ** (3.0 - q)
        brute = oracles.min_weighted_power(q, V)
        assert closed == pytest.approx(brute, rel=1e-9)
    for bad in (2.0, 3.0, 1.5, 3.5):
        with pytest.raises(ValueError):
            dg.cq_constant(bad)


def test_f_conditions_pass_for_valid_power():
    rep = dg.check_f_conditions(dg.Nonlinearity(p=2.5))
    assert rep.all_pass
    names = {c.name for c in rep.conditions}
    assert names == {"f_vanishes_at_zero", "f_growth_bounded",
                     "F_over_t2_increasing_unbounded", "f_nondecreasing",
                     "half_f_t2_dominates_F"}


def test_f_conditions_flag_boundary_exponent():
    # p = 2 makes F/t^2 flat, which the report must catch
    rep = dg.check_f_conditions(dg.Nonlinearity(p=2.0))
    assert not rep.all_pass
    assert not rep["F_over_t2_increasing_unbounded"].passed


def test_f_conditions_flag_constant_f():
    nl = dg.Nonlinearity(kind="custom", p=2.5,
                         f_fn=lambda s: np.ones_like(s),
                         F_fn=lambda s: s * s / 2)
    rep = dg.check_f_conditions(nl)
    assert not rep["f_vanishes_at_zero"].passed


def test_potential_pairs(grid8):
    pp = dg.constant_pair(grid8, a=1.0, v0=0.2, k0=1.0)
    assert pp.V.min() == pytest.approx(0.2)
    assert pp.K.max() == pytest.approx(1.0)
    rep = dg.check_vk_conditions(pp, grid8, q=2.5)
    # constant potentials satisfy the core positivity/gap condition; the
    # decay-family conditions are reported but cannot hold for them
    assert rep["vk_positive_and_v_below_mass"].passed
    assert not rep["k_shell_integrals_decay"].passed

    dec = dg.decay_pair(grid8, a=1.0, v0=0.5, gamma=1.0, k0=1.0, sigma=2.0)
    rep2 = dg.check_vk_conditions(dec, grid8, q=2.5)
    assert rep2.all_pass
    # decay family: K falls off along the radius
    r = grid8.radii
    k_near = dec.K[np.argmin(r)]
    k_far = dec.K[np.argmax(r)]
    assert k_far < 0.1 * k_near


def test_vk_conditions_flag_supercritical_v(grid8):
    pp = dg.constant_pair(grid8, a=1.0, v0=1.5, k0=1.0)
    rep = dg.check_vk_conditions(pp, grid8, q=2.5)
    assert not rep["vk_positive_and_v_below_mass"].passed


def test_model_weights_and_sums(model8, rng):
    g = model8.grid
    u = dg.random_field(g, rng)
    v = dg.random_field(g, rng)
    c0 = np.sum(np.abs(u.flat) ** 2, axis=1)
    c1 = np.sum((u.flat.conj() * v.flat).real, axis=1)
    c2 = np.sum(np.abs(v.flat) ** 2, axis=1)
    for t in (0.0, 0.3, 1.8):
        s = np.sqrt(np.abs(u.flat + t * v.flat) ** 2 @ np.ones(4))
        direct = float(model8.K @ model8.nl.F_arr(s)) * g.cell_volume
        got = model8.nonlin_F_sum(c0, c1, c2, t)
        assert got == pytest.approx(direct, rel=1e-12)


def test_validate_model_rejects_bad_exponent(grid8):
    nl = dg.Nonlinearity(p=3.5)
    pots = dg.constant_pair(grid8, a=1.0, v0=0.2, k0=1.0)
    model = dg.ProblemModel(grid8, 1.0, nl, pots)
    with pytest.raises(ModelValidationError):
        dg.validate_model(model)


def test_validate_model_rejects_large_potential(grid8):
    nl = dg.Nonlinearity(p=2.5)
    pots = dg.constant_pair(grid8, a=1.0, v0=2.0, k0=1.0)
    model = dg.ProblemModel(grid8, 1.0, nl, pots)
    with pytest.raises(ModelValidationError):
        dg.validate_model(model)


def test_default_model_is_valid():
    model = dg.default_model(n=8, L=6.0)
    dg.validate_model(model)
    assert model.a == 1.0
    assert model.nl.p == 2.5


if HAVE_HYPOTHESIS:

    @settings(max_examples=40, deadline=None)
    @given(st.floats(min_value=2.02, max_value=2.98),
           st.floats(min_value=0.01, max_value=20.0))
    def test_cq_is_the_minimum_property(q, V):
        closed = dg.cq_constant(q) * V ** (3.0 - q)
        ts = np.geomspace(1e-4, 1e4, 400)
        sampled = np.min(V * ts ** (2.0 - q) + ts ** (3.0 - q))
        assert closed <= sampled * (1 + 1e-9)
