"""Machine-checkable battery for every identity and inequality the
package relies on, from matrix algebra up to fiber-maximizer structure.

Each check runs independently and lands in the report as pass/fail with
its measured margin; a crash inside one check fails that entry without
stopping the rest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize_scalar

from . import algebra, kernels
from .energy import derivative_along, energy, nehari_identity_gap
from .errors import UniquenessError
from .field import (Grid, SpinorField, dft_forward, dft_inverse, graph_norm,
                    l2_norm, lq_norm, project_pm, random_field, to_frequency,
                    to_physical)
from .model import (ProblemModel, check_f_conditions, check_vk_conditions,
                    cq_constant)
from .nehari import (InnerOptions, fiber_point_field, inner_maximize,
                     scalar_h)

FloatArr = NDArray[np.float64]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float
    tolerance: float
    samples: int
    detail: str


@dataclass(frozen=True)
class DiagnosticsReport:
    checks: tuple[CheckResult, ...]
    n: int
    L: float
    a: float
    p: float
    seed: int

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        def num(x: float) -> float | None:
            return float(x) if np.isfinite(x) else None

        return {
            "environment": {"n": int(self.n), "L": float(self.L),
                            "a": float(self.a), "p": float(self.p),
                            "seed": int(self.seed)},
            "all_pass": bool(self.all_pass),
            "checks": [{"name": c.name, "passed": bool(c.passed),
                        "margin": num(c.margin), "tolerance": num(c.tolerance),
                        "samples": int(c.samples), "detail": c.detail}
                       for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def tail_fraction(u: SpinorField, r: float, q: float,
                  model: ProblemModel) -> float:
    """Share of the K-weighted q-mass outside radius r."""
    grid = u.grid
    if not 0 < r < grid.L:
        raise ValueError("radius must lie inside the box")
    if not 2.0 <= q <= 3.0:
        raise ValueError("q must lie in [2, 3]")
    mod = kernels.abs4(to_physical(u).flat)
    dens = model.K * mod ** q
    total = float(np.sum(dens))
    if total == 0.0:
        raise ValueError("field is identically zero")
    outside = float(np.sum(dens[grid.radii > r]))
    return outside / total


def superlevel_measure(u: SpinorField, t0: float, t1: float) -> float:
    """Volume of the set {t0 <= |u| <= t1}; t0^3 times it never exceeds
    the cubed L^3 norm."""
    if not 0 < t0 < t1:
        raise ValueError("need 0 < t0 < t1")
    mod = kernels.abs4(to_physical(u).flat)
    count = int(np.sum((mod >= t0) & (mod <= t1)))
    return count * u.grid.cell_volume


def _random_modes(rng: np.random.Generator, count: int, k_max: float) -> FloatArr:
    return rng.uniform(-k_max, k_max, size=(count, 3))


def _check_anticommutation(model, grid, rng) -> CheckResult:
    dev = 0.0
    eye2 = 2.0 * algebra.I4
    for i in range(3):
        for j in range(3):
            want = eye2 if i == j else np.zeros((4, 4))
            dev = max(dev, float(np.max(np.abs(
                algebra.anticommutator(algebra.ALPHA[i], algebra.ALPHA[j]) - want))))
        dev = max(dev, float(np.max(np.abs(
            algebra.anticommutator(algebra.ALPHA[i], algebra.BETA)))))
    dev = max(dev, float(np.max(np.abs(algebra.BETA @ algebra.BETA - algebra.I4))))
    return CheckResult("matrix_anticommutation", dev <= 1e-15, dev, 1e-15, 16,
                       "pairwise anticommutators and beta^2")


def _check_projectors(model, grid, rng) -> CheckResult:
    k_max = np.pi * (grid.n // 2) / grid.L
    dev = 0.0
    for k in _random_modes(rng, 1000, k_max):
        pp, pm = algebra.projector_pm(k, model.a)
        dev = max(dev,
                  float(np.max(np.abs(pp @ pp - pp))),
                  float(np.max(np.abs(pm @ pm - pm))),
                  float(np.max(np.abs(pp + pm - algebra.I4))),
                  float(np.max(np.abs(pp @ pm))))
    return CheckResult("projector_algebra", dev <= 1e-13, dev, 1e-13, 1000,
                       "idempotence, completeness, orthogonality per mode")


def _check_parseval(model, grid, rng) -> CheckResult:
    worst = 0.0
    for _ in range(10):
        u = random_field(grid, rng)
        uf = dft_forward(u)
        back = dft_inverse(uf)
        rt = float(np.max(np.abs(back.data - u.data)) / np.max(np.abs(u.data)))
        pars = abs(l2_norm(u) ** 2 - l2_norm(uf) ** 2) / l2_norm(u) ** 2
        worst = max(worst, rt, pars)
    return CheckResult("dft_parseval_roundtrip", worst <= 1e-12, worst, 1e-12,
                       10, "round-trip error and Parseval mismatch, relative")


def _check_spectral_gap(model, grid, rng) -> CheckResult:
    worst = np.inf
    for _ in range(100):
        u = random_field(grid, rng)
        margin = (graph_norm(u, model.a) ** 2
                  - model.a * l2_norm(u) ** 2) / graph_norm(u, model.a) ** 2
        worst = min(worst, margin)
    return CheckResult("spectral_gap_l2_bound", worst >= -1e-12, worst, 0.0,
                       100, "min of (|u|^2 - a |u|_2^2)/|u|^2")


def _check_remark_gap(model, grid, rng) -> CheckResult:
    t = np.logspace(-6, 3, 10_000)
    gap = 0.5 * model.nl.f_arr(t) * t * t - model.nl.F_arr(t)
    floor = float(np.min(gap))
    return CheckResult("nonlinearity_gap_positivity", floor >= -1e-12 * float(
        np.max(model.nl.F_arr(t))), floor, 0.0, t.size,
        "min of f(t)t^2/2 - F(t) on log-spaced samples")


def _check_fd_gradient(model, grid, rng) -> CheckResult:
    h = 1e-5
    worst = 0.0
    for _ in range(20):
        u = random_field(grid, rng, scale=0.5)
        v = random_field(grid, rng, scale=0.5)
        exact = derivative_along(u, v, model)
        up = SpinorField(grid, "physical", np.ascontiguousarray(u.data + h * v.data))
        um = SpinorField(grid, "physical", np.ascontiguousarray(u.data - h * v.data))
        fd = (energy(up, model).total - energy(um, model).total) / (2.0 * h)
        worst = max(worst, abs(exact - fd) / max(1.0, abs(exact)))
    return CheckResult("derivative_finite_difference", worst <= 1e-6, worst,
                       1e-6, 20, "central differences at h=1e-5, relative")


def _check_energy_signs(model, grid, rng) -> CheckResult:
    worst_neg = -np.inf
    for _ in range(20):
        _, um = project_pm(random_field(grid, rng, scale=0.5), model.a)
        val = energy(um, model).total
        worst_neg = max(worst_neg, val)
    worst_gap = 0.0
    worst_id = -np.inf
    for _ in range(20):
        u = random_field(grid, rng, scale=0.5)
        tot = energy(u, model).total
        worst_gap = max(worst_gap,
                        abs(nehari_identity_gap(u, model)) / (1.0 + abs(tot)))
        worst_id = max(worst_id,
                       -(tot - 0.5 * derivative_along(u, u, model)))
    ok = worst_neg < 0 and worst_gap <= 1e-10 and worst_id <= 1e-10
    return CheckResult(
        "negative_cone_energy_sign", bool(ok), worst_neg, 0.0, 60,
        f"max Phi on E-: {worst_neg:.3e}; identity gap {worst_gap:.3e}; "
        f"max of -(Phi - Phi'(u)u/2): {worst_id:.3e}")


def _check_scalar_h(model, grid, rng) -> CheckResult:
    worst = -np.inf
    for _ in range(10_000):
        t = abs(rng.normal(1.0, 1.0))
        u4 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v4 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        worst = max(worst, scalar_h(t, u4, v4, model.nl))
    return CheckResult("fiber_scalar_negativity", worst < 0, worst, 0.0,
                       10_000, "max of the comparison function h over samples")


def _fiber_sample(model, grid, rng, opts):
    u = random_field(grid, rng, scale=0.3)
    point, value, _ = inner_maximize(u, model, opts)
    return u, point, value


def _check_domination(model, grid, rng) -> CheckResult:
    opts = InnerOptions(starts=1, seed=int(rng.integers(1 << 31)))
    u, point, value = _fiber_sample(model, grid, rng, opts)
    u_m = fiber_point_field(u, point, model)
    u_m_f = to_frequency(u_m)
    worst = -np.inf
    for _ in range(50):
        t = float(rng.uniform(0.0, 3.0))
        _, pert = project_pm(random_field(grid, rng, scale=0.2), model.a)
        w = SpinorField(grid, "frequency", np.ascontiguousarray(
            t * u_m_f.data + to_frequency(pert).data))
        worst = max(worst, energy(w, model).total - value)
    return CheckResult("fiber_maximizer_domination", worst < 1e-9, worst,
                       1e-9, 50, "max of Phi(t u + v) - Phi(u) over the fiber")


def _check_uniqueness(model, grid, rng) -> CheckResult:
    opts = InnerOptions(starts=3, seed=int(rng.integers(1 << 31)))
    worst_t = 0.0
    worst_v = 0.0
    try:
        for _ in range(3):
            u, point, _ = _fiber_sample(model, grid, rng, opts)
            u_m = fiber_point_field(u, point, model)
            re_opts = InnerOptions(starts=2, seed=int(rng.integers(1 << 31)))
            re_point, _, _ = inner_maximize(u_m, model, re_opts)
            _, um_minus = project_pm(u_m, model.a)
            dv = graph_norm(SpinorField(grid, "frequency", np.ascontiguousarray(
                to_frequency(re_point.v).data - to_frequency(um_minus).data)),
                model.a)
            scale_v = max(1.0, graph_norm(um_minus, model.a))
            worst_t = max(worst_t, abs(re_point.t - 1.0))
            worst_v = max(worst_v, dv / scale_v)
    except UniquenessError as exc:
        return CheckResult("fiber_uniqueness_and_identity", False, np.inf,
                           1e-6, 3, f"starts disagreed: {exc}")
    worst = max(worst_t, worst_v)
    return CheckResult("fiber_uniqueness_and_identity", worst <= 1e-6, worst,
                       1e-6, 3, "re-projection of maximizers: |t-1| and "
                       "relative E- drift")


def _check_cq(model, grid, rng) -> CheckResult:
    worst = 0.0
    for _ in range(50):
        q = float(rng.uniform(2.05, 2.95))
        V = float(rng.uniform(0.1, 10.0))
        closed = cq_constant(q) * V ** (3.0 - q)
        t_star = (q - 2.0) * V / (3.0 - q)
        res = minimize_scalar(lambda t: V * t ** (2.0 - q) + t ** (3.0 - q),
                              bounds=(t_star / 100.0, t_star * 100.0),
                              method="bounded",
                              options={"xatol": 1e-12})
        worst = max(worst, abs(closed - res.fun) / abs(closed))
    return CheckResult("weighted_min_constant", worst <= 1e-7, worst, 1e-7,
                       50, "closed form vs bounded 1-D minimization")


def _check_superlevel(model, grid, rng) -> CheckResult:
    worst = -np.inf
    for _ in range(100):
        u = random_field(grid, rng, scale=float(rng.uniform(0.2, 2.0)))
        t0 = float(rng.uniform(0.05, 1.0))
        t1 = t0 + float(rng.uniform(0.05, 2.0))
        meas = superlevel_measure(u, t0, t1)
        worst = max(worst, t0 ** 3 * meas - lq_norm(u, 3) ** 3)
    return CheckResult("superlevel_volume_bound", worst <= 1e-10, worst, 0.0,
                       100, "max of t0^3 |A| - |u|_3^3")


def _check_potential_conditions(model, grid, rng) -> CheckResult:
    rep = check_vk_conditions(model.potentials, grid, q=model.nl.p)
    core = rep["vk_positive_and_v_below_mass"]
    flagged = [c.name for c in rep.conditions if not c.passed]
    return CheckResult("potential_conditions", core.passed, core.margin, 0.0,
                       grid.n ** 3,
                       "surrogate flags: " + (", ".join(flagged) or "none"))


def _check_nonlinearity_conditions(model, grid, rng) -> CheckResult:
    rep = check_f_conditions(model.nl, 2000)
    failed = [c.name for c in rep.conditions if not c.passed]
    return CheckResult("nonlinearity_conditions", rep.all_pass,
                       min(c.margin for c in rep.conditions), 0.0, 2000,
                       "failed: " + (", ".join(failed) or "none"))


_CHECKS = (
    ("matrix_anticommutation", _check_anticommutation),
    ("projector_algebra", _check_projectors),
    ("dft_parseval_roundtrip", _check_parseval),
    ("spectral_gap_l2_bound", _check_spectral_gap),
    ("nonlinearity_gap_positivity", _check_remark_gap),
    ("derivative_finite_difference", _check_fd_gradient),
    ("negative_cone_energy_sign", _check_energy_signs),
    ("fiber_scalar_negativity", _check_scalar_h),
    ("fiber_maximizer_domination", _check_domination),
    ("fiber_uniqueness_and_identity", _check_uniqueness),
    ("weighted_min_constant", _check_cq),
    ("superlevel_volume_bound", _check_superlevel),
    ("potential_conditions", _check_potential_conditions),
    ("nonlinearity_conditions", _check_nonlinearity_conditions),
)


def run_suite(model: ProblemModel, grid: Grid | None = None,
              seed: int = 0) -> DiagnosticsReport:
    """Run every check; failures (including crashes) become report rows."""
    grid = grid or model.grid
    if grid != model.grid:
        raise ValueError("diagnostics grid must match the model grid")
    results = []
    for i, (name, fn) in enumerate(_CHECKS):
        rng = np.random.default_rng([seed, i])
        try:
            results.append(fn(model, grid, rng))
        except Exception as exc:  # a crashed check is a failed check
            results.append(CheckResult(name, False, float("nan"),
                                       float("nan"), 0, f"raised {exc!r}"))
    return DiagnosticsReport(tuple(results), grid.n, grid.L, model.a,
                             model.nl.p, seed)
