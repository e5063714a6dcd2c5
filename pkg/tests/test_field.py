import numpy as np
import numpy.testing as npt
import pytest

try:
    from hypothesis import given, settings, strategies as st
    HAVE_HYPOTHESIS = True
except ImportError:
    HAVE_HYPOTHESIS = False

import diracgs as dg
from diracgs.errors import ReprMismatchError

import oracles


def test_grid_validation():
    with pytest.raises(ValueError):
        dg.Grid(n=7, L=4.0)
    with pytest.raises(ValueError):
        dg.Grid(n=4, L=4.0)
    with pytest.raises(ValueError):
        dg.Grid(n=8, L=0.0)


def test_grid_geometry(grid8):
    assert grid8.dx == pytest.approx(2 * 6.0 / 8)
    assert grid8.cell_volume == pytest.approx(grid8.dx ** 3)
    assert grid8.x1d[0] == pytest.approx(-6.0)
    # frequency axis carries the 2 pi / (2L) spacing
    assert grid8.k1d[1] == pytest.approx(np.pi / 6.0)


def test_forward_transform_matches_explicit_sum(grid8, rng):
    u = dg.random_field(grid8, rng)
    got = dg.dft_forward(u)
    want = oracles.dft_explicit(u.data, grid8.n, grid8.dx)
    npt.assert_allclose(got.data, want, atol=1e-12)


def test_roundtrip_and_parseval(grid8, rng):
    u = dg.random_field(grid8, rng, scale=1.7)
    uh = dg.to_frequency(u)
    back = dg.to_physical(uh)
    npt.assert_allclose(back.data, u.data, atol=1e-13)
    phys = np.sum(np.abs(u.data) ** 2) * grid8.cell_volume
    freq = np.sum(np.abs(uh.data) ** 2)
    assert freq == pytest.approx(phys, rel=1e-13)


def test_repr_guards(grid8, rng):
    u = dg.random_field(grid8, rng)
    uh = dg.to_frequency(u)
    with pytest.raises(ReprMismatchError):
        dg.dft_forward(uh)
    with pytest.raises(ReprMismatchError):
        dg.dft_inverse(u)
    with pytest.raises(ReprMismatchError):
        dg.l2_inner(u, uh)


def test_field_data_frozen(grid8, rng):
    u = dg.random_field(grid8, rng)
    with pytest.raises(ValueError):
        u.data[0, 0, 0, 0] = 1.0


def test_projection_splits_and_is_orthogonal(grid8, rng):
    u = dg.random_field(grid8, rng)
    up, um = dg.project_pm(u, a=1.0)
    npt.assert_allclose(up.data + um.data, u.data, atol=1e-12)
    # graph-orthogonal complement, idempotent
    assert dg.graph_inner(up, um, a=1.0) == pytest.approx(0.0, abs=1e-10)
    up2, _ = dg.project_pm(up, a=1.0)
    npt.assert_allclose(up2.data, up.data, atol=1e-12)


def test_project_pm_matches_matrix_oracle(grid8, rng):
    u = dg.to_frequency(dg.random_field(grid8, rng))
    up, um = dg.project_pm(u, a=1.0)
    kx, ky, kz = grid8.modes
    flat = u.flat
    i = int(rng.integers(0, flat.shape[0]))
    pp, pm = oracles.projectors_eig(kx[i], ky[i], kz[i], 1.0)
    npt.assert_allclose(up.flat[i], pp @ flat[i], atol=1e-12)
    npt.assert_allclose(um.flat[i], pm @ flat[i], atol=1e-12)


def test_apply_dirac_single_mode(grid8):
    # one Fourier mode: the operator must act as its 4x4 symbol there
    n = grid8.n
    data = np.zeros((n, n, n, 4), dtype=np.complex128)
    spin = np.array([0.3, -0.1 + 0.2j, 0.7j, 0.05])
    data[2, 1, 5] = spin
    uh = dg.SpinorField(grid8, "frequency", data)
    out = dg.apply_dirac(uh, a=1.2)
    kx, ky, kz = grid8.modes
    i = np.ravel_multi_index((2, 1, 5), (n, n, n))
    want = oracles.dirac_matrix(kx[i], ky[i], kz[i], 1.2) @ spin
    npt.assert_allclose(out.data[2, 1, 5], want, atol=1e-12)
    mask = np.ones((n, n, n), dtype=bool)
    mask[2, 1, 5] = False
    assert np.all(out.data[mask] == 0)


def test_spectral_gap_lower_bound(grid8, rng):
    a = 1.0
    for _ in range(20):
        u = dg.random_field(grid8, rng, scale=float(rng.uniform(0.1, 3.0)))
        gap = dg.graph_norm(u, a) ** 2 - a * dg.l2_norm(u) ** 2
        assert gap >= -1e-10 * dg.graph_norm(u, a) ** 2


def test_graph_normalize(grid8, rng):
    u = dg.random_field(grid8, rng, scale=4.0)
    w = dg.graph_normalize(u, a=1.0)
    assert dg.graph_norm(w, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_lq_norm_consistency(grid8, rng):
    u = dg.random_field(grid8, rng)
    assert dg.lq_norm(u, 2.0) == pytest.approx(dg.l2_norm(u), rel=1e-12)


if HAVE_HYPOTHESIS:

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 31),
           st.floats(min_value=0.05, max_value=5.0))
    def test_parseval_property(seed, scale):
        grid = dg.Grid(n=8, L=5.0)
        u = dg.random_field(grid, np.random.default_rng(seed), scale=scale)
        uh = dg.to_frequency(u)
        phys = np.sum(np.abs(u.data) ** 2) * grid.cell_volume
        assert np.sum(np.abs(uh.data) ** 2) == pytest.approx(phys, rel=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 31),
           st.floats(min_value=0.25, max_value=4.0))
    def test_gap_property(seed, a):
        grid = dg.Grid(n=8, L=5.0)
        u = dg.random_field(grid, np.random.default_rng(seed))
        assert a * dg.l2_norm(u) ** 2 <= dg.graph_norm(u, a) ** 2 * (1 + 1e-12)
