"""Problem data: nonlinearity f/F, potential pair (V, K), and checkers.

The default nonlinearity is the pure power f(s) = s^(p-2) with
F(t) = t^p / p and 2 < p < 3. A custom nonlinearity supplies vectorized
callables for f and F; solvers only ever use f and F values, never f'.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from . import kernels
from .errors import ModelValidationError
from .field import Grid

FloatArr = NDArray[np.float64]
ComplexArr = NDArray[np.complex128]


@dataclass(frozen=True)
class Nonlinearity:
    kind: str = "power"
    p: float = 2.5
    f_fn: Callable[[FloatArr], FloatArr] | None = None
    F_fn: Callable[[FloatArr], FloatArr] | None = None

    def __post_init__(self) -> None:
        # out-of-range p is constructible so the condition checkers can
        # report exactly which structure condition it breaks
        if self.kind == "power":
            if not (np.isfinite(self.p) and self.p > 0):
                raise ModelValidationError("power exponent p must be positive")
        elif self.kind == "custom":
            if self.f_fn is None or self.F_fn is None:
                raise ModelValidationError("custom nonlinearity needs f_fn and F_fn")
        else:
            raise ModelValidationError(f"unknown nonlinearity kind {self.kind!r}")

    def f_arr(self, s: FloatArr) -> FloatArr:
        if self.kind == "power":
            return s ** (self.p - 2.0)
        return np.asarray(self.f_fn(s), dtype=np.float64)

    def F_arr(self, t: FloatArr) -> FloatArr:
        if self.kind == "power":
            return t ** self.p / self.p
        return np.asarray(self.F_fn(t), dtype=np.float64)


def f_eval(nl: Nonlinearity, s: float) -> float:
    if s < 0:
        raise ValueError("f is defined for nonnegative arguments")
    return float(nl.f_arr(np.asarray([s], dtype=np.float64))[0])


def F_eval(nl: Nonlinearity, t: float) -> float:
    if t < 0:
        raise ValueError("F is defined for nonnegative arguments")
    return float(nl.F_arr(np.asarray([t], dtype=np.float64))[0])


def cq_constant(q: float) -> float:
    """Constant C_q with C_q V^(3-q) = min_{t>0} (V t^(2-q) + t^(3-q))."""
    if not 2.0 < q < 3.0:
        raise ValueError("q must lie in (2, 3)")
    return (1.0 / (3.0 - q)) * ((q - 2.0) / (3.0 - q)) ** (2.0 - q)


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    detail: str
    margin: float


@dataclass(frozen=True)
class ConditionReport:
    conditions: tuple[ConditionResult, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def check_f_conditions(nl: Nonlinearity, sample_count: int = 10_000) -> ConditionReport:
    """Sampled report on the four structure conditions plus the
    half-f-t^2-minus-F inequality.

    Asymptotic statements become finite surrogates: vanishing at zero is
    tested as decay across the sampled left end, unboundedness of F/t^2
    as growth across the right end. Monotonicity of f is tested as
    nondecreasing, with strictness flagged in the detail text.
    """
    if sample_count < 100:
        raise ValueError("sample_count must be at least 100")
    s = np.logspace(-12, 6, sample_count)
    fs = nl.f_arr(s)

    f_small = float(fs[0])
    f_big = float(np.max(fs))
    vanish = f_small < 1e-10 or (f_big > 0 and f_small / f_big < 0.9)
    c1 = ConditionResult("f_vanishes_at_zero", bool(vanish),
                         f"f({s[0]:.1e}) = {f_small:.3e}, max sampled f = {f_big:.3e}",
                         f_big - f_small)

    p_bound = nl.p if nl.kind == "power" and 2.0 < nl.p < 3.0 else 3.0
    ratio = fs * s / (s + s ** (p_bound - 1.0))
    tail_ok = float(ratio[-1]) <= 1.05 * float(np.max(ratio[:-sample_count // 10]))
    c2 = ConditionResult("f_growth_bounded", bool(tail_ok),
                         f"sup f(s)s/(s + s^{p_bound - 1:.2f}) = {np.max(ratio):.3e}",
                         float(np.max(ratio)))

    t = np.logspace(-3, 6, sample_count)
    g = nl.F_arr(t) / t ** 2
    increasing = bool(np.all(np.diff(g) > -1e-14 * np.maximum(g[:-1], 1e-300)))
    unbounded = float(g[-1]) > 10.0 * max(float(g[0]), 1e-300)
    c3 = ConditionResult("F_over_t2_increasing_unbounded", increasing and unbounded,
                         f"F/t^2 spans [{g[0]:.3e}, {g[-1]:.3e}]", float(g[-1] - g[0]))

    diffs = np.diff(fs)
    nondecr = bool(np.all(diffs > -1e-14 * np.maximum(np.abs(fs[:-1]), 1e-300)))
    strict = bool(np.all(diffs > 0))
    c4 = ConditionResult("f_nondecreasing", nondecr,
                         f"strictly increasing: {strict}", float(np.min(diffs)))

    gap = 0.5 * fs * s * s - nl.F_arr(s)
    c5 = ConditionResult("half_f_t2_dominates_F",
                         bool(np.all(gap >= -1e-12 * np.maximum(nl.F_arr(s), 1.0))),
                         f"min of f(t)t^2/2 - F(t) over samples = {np.min(gap):.3e}",
                         float(np.min(gap)))

    return ConditionReport((c1, c2, c3, c4, c5))


def _v_profile(family: str, r: FloatArr, params: dict[str, float]) -> FloatArr:
    if family == "constant":
        return np.full_like(r, params["v0"])
    if family == "decay":
        return params["v0"] / (1.0 + r * r) ** params["gamma"]
    raise ModelValidationError(f"unknown V profile {family!r}")


def _k_profile(family: str, r: FloatArr, params: dict[str, float]) -> FloatArr:
    if family == "constant":
        return np.full_like(r, params["k0"])
    if family == "decay":
        return params["k0"] * np.exp(-r / params["sigma"])
    raise ModelValidationError(f"unknown K profile {family!r}")


@dataclass(frozen=True)
class PotentialPair:
    """Sampled V and K on the grid, flattened to match field layout."""

    grid: Grid
    a: float
    family: str
    V: FloatArr
    K: FloatArr

    def __post_init__(self) -> None:
        m = self.grid.n ** 3
        if self.V.shape != (m,) or self.K.shape != (m,):
            raise ValueError("V and K must be flat arrays over the grid")
        self.V.flags.writeable = False
        self.K.flags.writeable = False


def constant_pair(grid: Grid, a: float, v0: float, k0: float) -> PotentialPair:
    r = grid.radii
    return PotentialPair(grid, a, "constant",
                         _v_profile("constant", r, {"v0": v0}),
                         _k_profile("constant", r, {"k0": k0}))


def decay_pair(grid: Grid, a: float, v0: float, gamma: float,
               k0: float, sigma: float) -> PotentialPair:
    """V = v0/(1+|x|^2)^gamma, K = k0 exp(-|x|/sigma)."""
    r = grid.radii
    return PotentialPair(grid, a, "decay",
                         _v_profile("decay", r, {"v0": v0, "gamma": gamma}),
                         _k_profile("decay", r, {"k0": k0, "sigma": sigma}))


def table_pair(grid: Grid, a: float, V: FloatArr, K: FloatArr) -> PotentialPair:
    return PotentialPair(grid, a, "table",
                         np.ascontiguousarray(V, dtype=np.float64).ravel().copy(),
                         np.ascontiguousarray(K, dtype=np.float64).ravel().copy())


def check_vk_conditions(pp: PotentialPair, grid: Grid, q: float,
                        shells: int = 8) -> ConditionReport:
    """Positivity/boundedness checks plus sampled decay surrogates.

    The tail conditions are asymptotic and cannot be decided on a box;
    shell-binned quantities and their trend are reported instead. A
    surrogate "decays" when its outermost shell sits below half its
    peak shell.
    """
    vmin, vmax = float(np.min(pp.V)), float(np.max(pp.V))
    kmin = float(np.min(pp.K))
    vk0 = vmin > 0 and kmin > 0 and vmax < pp.a
    c0 = ConditionResult("vk_positive_and_v_below_mass", bool(vk0),
                         f"min V = {vmin:.3e}, max V = {vmax:.3e}, "
                         f"min K = {kmin:.3e}, a = {pp.a}", pp.a - vmax)

    sup_ratio = float(np.max(pp.K / pp.V))
    c2 = ConditionResult("k_over_v_bounded", np.isfinite(sup_ratio),
                         f"sup K/V = {sup_ratio:.3e}", sup_ratio)

    r = grid.radii
    edges = np.linspace(0.0, grid.L, shells + 1)
    which = np.clip(np.searchsorted(edges, r, side="right") - 1, 0, shells - 1)
    inside = r < grid.L

    k_shell = np.zeros(shells)
    ratio_shell = np.zeros(shells)
    ratio_field = pp.K / pp.V ** (3.0 - q)
    for i in range(shells):
        sel = inside & (which == i)
        if np.any(sel):
            k_shell[i] = float(np.sum(pp.K[sel])) * grid.cell_volume
            ratio_shell[i] = float(np.max(ratio_field[sel]))

    k_decays = k_shell[-1] < 0.5 * np.max(k_shell)
    c1 = ConditionResult("k_shell_integrals_decay", bool(k_decays),
                         "shell integrals of K: "
                         + ", ".join(f"{v:.3e}" for v in k_shell),
                         float(np.max(k_shell) - k_shell[-1]))

    r_decays = ratio_shell[-1] < 0.5 * np.max(ratio_shell)
    c3 = ConditionResult("k_over_v_power_decays", bool(r_decays),
                         f"shell maxima of K/V^(3-q), q={q}: "
                         + ", ".join(f"{v:.3e}" for v in ratio_shell),
                         float(np.max(ratio_shell) - ratio_shell[-1]))

    return ConditionReport((c0, c1, c2, c3))


@dataclass(frozen=True)
class ProblemModel:
    """Grid, mass, nonlinearity and potentials, ready for the solver."""

    grid: Grid
    a: float
    nl: Nonlinearity
    potentials: PotentialPair
    Vw: FloatArr = dc_field(init=False, repr=False)
    Kw: FloatArr = dc_field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise ModelValidationError("mass a must be positive")
        if self.potentials.grid != self.grid:
            raise ModelValidationError("potentials sampled on a different grid")
        if self.potentials.a != self.a:
            raise ModelValidationError("potential pair carries a different mass")
        w = self.grid.cell_volume
        object.__setattr__(self, "Vw", np.ascontiguousarray(self.potentials.V * w))
        object.__setattr__(self, "Kw", np.ascontiguousarray(self.potentials.K * w))

    @property
    def V(self) -> FloatArr:
        return self.potentials.V

    @property
    def K(self) -> FloatArr:
        return self.potentials.K

    def nonlin_F_sum(self, c0: FloatArr, c1: FloatArr, c2: FloatArr, t: float) -> float:
        """sum_x K F(s_t) dx^3 with s_t = sqrt(c0 + 2t c1 + t^2 c2)."""
        if self.nl.kind == "power":
            return kernels.pow_F_sum(self.Kw, c0, c1, c2, t, self.nl.p)
        s = np.sqrt(np.maximum(c0 + 2.0 * t * c1 + t * t * c2, 0.0))
        return float(self.Kw @ self.nl.F_arr(s))

    def nonlin_g_sum(self, c0: FloatArr, c1: FloatArr, c2: FloatArr, t: float) -> float:
        """sum_x K f(s_t) (c1 + t c2) dx^3, the fiber t-derivative term."""
        if self.nl.kind == "power":
            return kernels.pow_g_sum(self.Kw, c0, c1, c2, t, self.nl.p)
        s2 = np.maximum(c0 + 2.0 * t * c1 + t * t * c2, 0.0)
        s = np.sqrt(s2)
        return float(self.Kw @ (self.nl.f_arr(s) * (c1 + t * c2)))

    def nonlin_field(self, s: FloatArr, u: ComplexArr) -> ComplexArr:
        """Pointwise K f(s) u, the nonlinear residual term (no dx^3)."""
        if self.nl.kind == "power":
            return kernels.pow_f_field(self.K, s, u, self.nl.p)
        return (self.K * self.nl.f_arr(s))[:, None] * u


def default_model(n: int = 16, L: float = 8.0, a: float = 1.0,
                  p: float = 2.5, v0: float = 0.2, k0: float = 1.0) -> ProblemModel:
    grid = Grid(n, L)
    return ProblemModel(grid, a, Nonlinearity("power", p), constant_pair(grid, a, v0, k0))


def validate_model(model: ProblemModel) -> None:
    """Raise unless the positivity/mass-gap condition and the core
    nonlinearity conditions hold; decay surrogates only warn in reports."""
    rep = check_vk_conditions(model.potentials, model.grid, q=model.nl.p)
    if not rep["vk_positive_and_v_below_mass"].passed:
        raise ModelValidationError(rep["vk_positive_and_v_below_mass"].detail)
    frep = check_f_conditions(model.nl, 1000)
    for name in ("f_vanishes_at_zero", "f_growth_bounded",
                 "F_over_t2_increasing_unbounded",
                 "f_nondecreasing", "half_f_t2_dominates_F"):
        if not frep[name].passed:
            raise ModelValidationError(f"nonlinearity fails {name}: {frep[name].detail}")
