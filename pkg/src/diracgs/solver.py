"""Ground-state search: descent on the reduced functional over the unit
sphere of the positive spectral subspace.

Each outer iterate w is a unit E+ direction; its fiber maximizer
(t_w, v_w) is tracked by warm-started inner solves, and the raw descent
direction is the graph-dual tangential gradient. The reduced landscape
turns badly conditioned near its minimum (shallow drift directions of
the soliton coexist with stiff radial modes), so raw-gradient steps are
bent through a limited-memory quasi-Newton recursion in the graph
metric, with Armijo backtracking and a radial-projection retraction;
accepted values never increase beyond roundoff. The run stops when the
full dual residual of the derivative at t_w w + v_w passes tolerance,
which is the discrete form of full criticality.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np
from numpy.typing import NDArray

from . import kernels
from .energy import energy
from .errors import GridMismatchError, MaxIterationsError, UniquenessError
from .field import (Grid, SpinorField, graph_norm, lambda_table, project_pm,
                    to_frequency, to_physical)
from .model import ProblemModel
from .nehari import (InnerOptions, NehariPoint, NehariResidual,
                     _dual_residual_freq, fiber_point_field, inner_maximize,
                     nehari_residual)

FloatArr = NDArray[np.float64]
ComplexArr = NDArray[np.complex128]

# curvature pairs kept by the quasi-Newton recursion; more buys little
_LBFGS_MEMORY = 12


@dataclass(frozen=True)
class SolveOptions:
    tol_outer: float = 1e-6
    max_outer: int = 500
    step0: float = 1.0
    armijo_c: float = 1e-4
    starts: int = 3
    seed: int = 0
    tol_inner: float = 1e-9
    unique_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.tol_outer <= 0 or self.tol_inner <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_outer < 1 or self.starts < 1:
            raise ValueError("max_outer and starts must be at least 1")


@dataclass(frozen=True)
class TraceRow:
    iter: int
    m_value: float
    residual: float
    step: float
    inner_iters: int


@dataclass(frozen=True)
class GroundStateResult:
    u_star: SpinorField
    c: float
    residuals: NehariResidual
    residual_full: float
    point: NehariPoint
    t_check: float
    converged: bool
    no_descent: bool
    iterations: int
    trace: tuple[TraceRow, ...]
    alpha_numeric: float
    delta_numeric: float
    wall_time: float
    start_index: int = dc_field(default=0)


def initial_guess(grid: Grid, model: ProblemModel, seed: int = 0,
                  kind: str = "gaussian_bump") -> SpinorField:
    """Unit E+ direction: a centered Gaussian envelope on a constant
    spinor, or random mode coefficients."""
    rng = np.random.default_rng(seed)
    shape = (grid.n,) * 3 + (4,)
    if kind == "gaussian_bump":
        sigma = grid.L / 4.0
        env = np.exp(-grid.radii ** 2 / (2.0 * sigma * sigma))
        for comp in range(4):
            data = np.zeros(shape, dtype=np.complex128)
            data[..., comp] = env.reshape((grid.n,) * 3)
            u = SpinorField(grid, "physical", data)
            up, _ = project_pm(u, model.a)
            if graph_norm(up, model.a) > 1e-12:
                return _unit_freq(up, model.a)
        raise ValueError("gaussian envelope has no positive part on any spinor")
    if kind == "random":
        data = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        u = SpinorField(grid, "frequency", np.ascontiguousarray(data))
        up, _ = project_pm(u, model.a)
        return _unit_freq(up, model.a)
    raise ValueError(f"unknown initial-guess kind {kind!r}")


def _unit_freq(u: SpinorField, a: float) -> SpinorField:
    uf = to_frequency(u)
    nrm = graph_norm(uf, a)
    return SpinorField(uf.grid, "frequency", np.ascontiguousarray(uf.data / nrm))


def _gradient_state(w: SpinorField, point: NehariPoint, model: ProblemModel
                    ) -> tuple[ComplexArr, float, float, float, float, float]:
    """One residual evaluation at u_w = t w + v.

    Returns (tangential dual gradient flat, grad_norm2, residual_full,
    residual_minus, r_self, |u_w|_graph).
    """
    grid = w.grid
    lam = lambda_table(grid, model.a)
    kx, ky, kz = grid.modes
    u_w = fiber_point_field(w, point, model)
    r_hat, u_hat = _dual_residual_freq(u_w, model)
    res_full = float(np.sqrt(max(
        kernels.weighted_norm2(np.ascontiguousarray(1.0 / lam), r_hat), 0.0)))
    ones = np.ones_like(lam)
    r_self = kernels.weighted_inner(ones, r_hat, u_hat)
    g_hat = np.ascontiguousarray(r_hat / lam[:, None])
    gp, gm = kernels.split_pm(g_hat, kx, ky, kz, lam, model.a)
    res_minus = float(np.sqrt(max(kernels.weighted_norm2(lam, gm), 0.0)))
    wf = to_frequency(w).flat
    coeff = kernels.weighted_inner(lam, gp, wf)
    gf = point.t * (gp - coeff * wf)
    gnorm2 = kernels.weighted_norm2(lam, np.ascontiguousarray(gf))
    unorm = float(np.sqrt(max(kernels.weighted_norm2(lam, u_hat), 0.0)))
    return gf, gnorm2, res_full, res_minus, r_self, unorm


def _single_start(model: ProblemModel, opts: SolveOptions, index: int
                  ) -> GroundStateResult:
    grid = model.grid
    t0 = time.perf_counter()
    kind = "gaussian_bump" if index == 0 else "random"
    w = initial_guess(grid, model, seed=opts.seed + index, kind=kind)
    iopts = InnerOptions(tol_inner=opts.tol_inner, starts=1,
                         unique_tol=opts.unique_tol, seed=opts.seed + index)
    return _descend(model, opts, w, iopts, None, index, t0)


def _descend(model: ProblemModel, opts: SolveOptions, w: SpinorField,
             iopts: InnerOptions, warm: NehariPoint | None, index: int,
             t0: float) -> GroundStateResult:
    grid = model.grid
    lam = lambda_table(grid, model.a)
    shape = (grid.n,) * 3 + (4,)

    def dot(x: ComplexArr, y: ComplexArr) -> float:
        return kernels.weighted_inner(lam, np.ascontiguousarray(x),
                                      np.ascontiguousarray(y))

    point, m_val, in_iters = inner_maximize(w, model, iopts, warm_start=warm)
    trace: list[TraceRow] = []
    step = opts.step0
    hist: list[tuple[ComplexArr, ComplexArr, float]] = []
    prev_wf: ComplexArr | None = None
    prev_gf: ComplexArr | None = None
    converged = False
    no_descent = False
    alpha_numeric = m_val
    delta_numeric = point.t

    it = 0
    for it in range(1, opts.max_outer + 1):
        gf, gnorm2, res_full, _, _, unorm = _gradient_state(w, point, model)
        trace.append(TraceRow(it - 1, m_val, res_full, step, in_iters))
        alpha_numeric = min(alpha_numeric, m_val)
        delta_numeric = min(delta_numeric, point.t)
        if res_full <= opts.tol_outer * max(1.0, unorm):
            converged = True
            break

        wf = to_frequency(w).flat
        # limited-memory quasi-Newton direction on the sphere; curvature
        # pairs are projected onto the current tangent space when stored.
        # Only moves that met the Armijo test contribute pairs (noise-floor
        # acceptances carry no curvature signal), and pairs whose measured
        # curvature is negligible against the step length are dropped.
        if prev_wf is not None:
            sv = wf - prev_wf
            yv = gf - prev_gf
            sv = np.ascontiguousarray(sv - dot(sv, wf) * wf)
            yv = np.ascontiguousarray(yv - dot(yv, wf) * wf)
            sy = dot(sv, yv)
            ss = dot(sv, sv)
            floor = np.sqrt(max(ss * dot(yv, yv), 1e-300))
            if sy > 1e-12 * floor and sy > 1e-8 * ss:
                hist.append((sv, yv, 1.0 / sy))
                if len(hist) > _LBFGS_MEMORY:
                    hist.pop(0)
        prev_wf = prev_gf = None
        q = gf.copy()
        alphas = []
        for sv, yv, rho in reversed(hist):
            a_i = rho * dot(sv, q)
            alphas.append(a_i)
            q -= a_i * yv
        if hist:
            sv, yv, rho = hist[-1]
            q *= dot(sv, yv) / max(dot(yv, yv), 1e-300)
        for (sv, yv, rho), a_i in zip(hist, reversed(alphas)):
            q += sv * (a_i - rho * dot(yv, q))
        d = -q
        slope = dot(d, gf)
        if not np.isfinite(slope) or slope >= 0:
            d = -gf
            slope = -gnorm2
            hist.clear()

        # Armijo decrements below the evaluation noise of m cannot be
        # certified in double precision; near the natural step a move is
        # kept whenever m does not rise above the noise. A bent direction
        # that fails both tests down to small steps is abandoned for the
        # raw gradient in the same iteration, with the history cleared:
        # accepting micro-steps along it would feed garbage curvature back
        # into the recursion and deadlock the descent.
        noise = 1e-13 * max(1.0, abs(m_val))
        accepted = False
        for attempt in range(2):
            raw_dir = not hist or attempt == 1
            if attempt == 1:
                if not hist:
                    break
                hist.clear()
                d = -gf
                slope = -gnorm2
            s = opts.step0 if raw_dir else 1.0
            while s > 1e-12:
                trial_f = np.ascontiguousarray((wf + s * d).reshape(shape))
                nrm = np.sqrt(max(kernels.weighted_norm2(
                    lam, trial_f.reshape(-1, 4)), 0.0))
                w_try = SpinorField(grid, "frequency",
                                    np.ascontiguousarray(trial_f / nrm))
                try:
                    pt_try, m_try, in_iters = inner_maximize(
                        w_try, model, iopts, warm_start=point)
                except (MaxIterationsError, UniquenessError):
                    s *= 0.5
                    continue
                if m_try <= m_val + opts.armijo_c * s * slope:
                    w, point, m_val = w_try, pt_try, m_try
                    prev_wf, prev_gf = wf.copy(), gf.copy()
                    accepted = True
                    break
                if m_try <= m_val + noise and (raw_dir or s >= 0.25):
                    w, point, m_val = w_try, pt_try, m_try
                    accepted = True
                    break
                s *= 0.5
            if accepted:
                break
        if not accepted:
            no_descent = True
            break
        step = s

    u_star_f = fiber_point_field(w, point, model)
    u_star = to_physical(u_star_f)
    c = energy(u_star, model).total
    res = nehari_residual(u_star, model)
    _, _, res_full, _, _, unorm = _gradient_state(w, point, model)
    if not (converged or no_descent):
        # the loop ran out after an accepted step; record the end state
        trace.append(TraceRow(it, m_val, res_full, step, in_iters))

    check_opts = InnerOptions(tol_inner=opts.tol_inner, starts=2,
                              unique_tol=opts.unique_tol, seed=opts.seed + 7)
    check_point, _, _ = inner_maximize(u_star, model, check_opts)

    return GroundStateResult(
        u_star=u_star, c=c, residuals=res, residual_full=res_full,
        point=point, t_check=check_point.t, converged=converged,
        no_descent=no_descent, iterations=it, trace=tuple(trace),
        alpha_numeric=min(alpha_numeric, m_val),
        delta_numeric=min(delta_numeric, point.t),
        wall_time=time.perf_counter() - t0, start_index=index)


def _thread_cap(starts: int) -> int:
    env = os.environ.get("NDIRAC_THREADS", "")
    if env.strip():
        return max(1, min(int(env), starts))
    return max(1, min(os.cpu_count() or 1, starts))


def minimize_ground_state(model: ProblemModel, opts: SolveOptions | None = None
                          ) -> GroundStateResult:
    """Best ground-state candidate over independent starts.

    Start 0 is the deterministic Gaussian bump, the rest are random.
    Ties favor converged runs, then lower full residual, then lower
    energy.
    """
    opts = opts or SolveOptions()
    workers = _thread_cap(opts.starts)
    if workers == 1 or opts.starts == 1:
        results = [_single_start(model, opts, i) for i in range(opts.starts)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _single_start(model, opts, i),
                                    range(opts.starts)))
    return min(results, key=lambda r: (not r.converged, r.residual_full, r.c))


def refine(result: GroundStateResult, model: ProblemModel,
           opts: SolveOptions | None = None) -> GroundStateResult:
    """Re-minimize on a strictly finer grid, warm-started by zero-padding
    the converged state in frequency."""
    opts = opts or SolveOptions()
    coarse = result.u_star.grid
    fine = model.grid
    if fine.n <= coarse.n:
        raise GridMismatchError(
            f"target grid n={fine.n} is not finer than n={coarse.n}")
    if fine.L != coarse.L:
        raise GridMismatchError("refinement must keep the box size")

    u_pad = _zero_pad(to_frequency(result.u_star), fine)
    v_pad = _zero_pad(to_frequency(result.point.v), fine)
    up, _ = project_pm(u_pad, model.a)
    w0 = _unit_freq(up, model.a)
    # u* = t w + v with unit w, so after padding |u*_+| carries the t
    warm = NehariPoint(graph_norm(up, model.a), v_pad)
    iopts = InnerOptions(tol_inner=opts.tol_inner, starts=1,
                         unique_tol=opts.unique_tol, seed=opts.seed)
    return _descend(model, opts, w0, iopts, warm, result.start_index,
                    time.perf_counter())


def _zero_pad(uf: SpinorField, fine: Grid) -> SpinorField:
    """Inject coarse frequency coefficients at the same integer modes.

    The DFT normalization ties coefficients to physical amplitudes
    through L only, so resolved modes keep their values exactly.
    """
    n_c, n_f = uf.grid.n, fine.n
    out = np.zeros((n_f,) * 3 + (4,), dtype=np.complex128)
    # integer index arithmetic only: fftfreq-derived floats truncate to
    # the wrong slot for non-dyadic n_c, which scrambles modes
    half = n_c // 2
    idx = np.concatenate([np.arange(half, dtype=np.intp),
                          np.arange(n_f - half, n_f, dtype=np.intp)])
    out[np.ix_(idx, idx, idx)] = uf.data
    return SpinorField(fine, "frequency", out)
