"""Fiber maximization over the half-space R+ u+ (+) E- and the reduced
functional on the unit sphere of the positive spectral subspace.

For a direction u with nonzero positive part, the fiber functional

    gamma_u(t, v) = Phi(t u+ + v),  t >= 0,  v in E-,

has a unique maximizer; the point t u+ + v at the maximum satisfies the
constrained-criticality residuals (derivative along u and along all of
E- both vanish). The maximizer is found by alternating a safeguarded
1-D root find in t with preconditioned gradient ascent in v. Every line
search is evaluated through pointwise quadratic-form tables, so one
ascent iteration costs exactly two FFTs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from . import kernels
from .energy import energy
from .errors import DegenerateFiberError, MaxIterationsError, UniquenessError
from .field import (Grid, SpinorField, graph_norm, lambda_table, project_pm,
                    to_frequency, to_physical)
from .model import Nonlinearity, ProblemModel

FloatArr = NDArray[np.float64]
ComplexArr = NDArray[np.complex128]


@dataclass(frozen=True)
class NehariPoint:
    """Fiber coordinates of a maximizer: scale t and the E- component."""

    t: float
    v: SpinorField


@dataclass(frozen=True)
class NehariResidual:
    """Membership residuals: derivative along u and along E-."""

    r_self: float
    r_minus: float

    def passes(self, tol: float) -> bool:
        return abs(self.r_self) <= tol and self.r_minus <= tol


@dataclass(frozen=True)
class InnerOptions:
    tol_inner: float = 1e-9
    max_iter: int = 400
    starts: int = 2
    unique_tol: float = 1e-6
    suff_increase: float = 1e-4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tol_inner <= 0 or self.max_iter < 1 or self.starts < 1:
            raise ValueError("invalid inner-solve options")


def _rowdot_re(u: ComplexArr, v: ComplexArr) -> FloatArr:
    """Pointwise Re(u . conj(v)) summed over the 4 components."""
    return (np.einsum("mc,mc->m", u.real, v.real)
            + np.einsum("mc,mc->m", u.imag, v.imag))


def scalar_h(t: float, u4: ComplexArr, v4: ComplexArr, nl: Nonlinearity) -> float:
    """Single-point comparison function behind fiber-maximizer uniqueness.

    Returns f(|u|) Re(u . ((t^2-1)/2 u + t v)) + F(|u|) - F(|t u + v|);
    negative whenever v != 0, and zero at (t, v) = (1, 0).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    u4 = np.asarray(u4, dtype=np.complex128).reshape(4)
    v4 = np.asarray(v4, dtype=np.complex128).reshape(4)
    mu = float(np.sqrt(np.sum(u4.real ** 2 + u4.imag ** 2)))
    mw = float(np.linalg.norm(t * u4 + v4))
    re_uv = float(np.sum(u4.real * v4.real + u4.imag * v4.imag))
    fval = float(nl.f_arr(np.asarray([mu]))[0])
    Fu = float(nl.F_arr(np.asarray([mu]))[0])
    Fw = float(nl.F_arr(np.asarray([mw]))[0])
    return fval * (0.5 * (t * t - 1.0) * mu * mu + t * re_uv) + Fu - Fw


def gamma(u: SpinorField, t: float, v: SpinorField, model: ProblemModel) -> float:
    """Phi(t u+ + v) for v in E-."""
    up, _ = project_pm(u, model.a)
    if graph_norm(up, model.a) <= 1e-14 * max(1.0, graph_norm(u, model.a)):
        raise DegenerateFiberError("direction has no positive spectral part")
    upf = to_frequency(up)
    vf = to_frequency(v)
    w = SpinorField(u.grid, "frequency",
                    np.ascontiguousarray(t * upf.data + vf.data))
    return energy(w, model).total


def _dual_residual_freq(u: SpinorField, model: ProblemModel
                        ) -> tuple[ComplexArr, ComplexArr]:
    """(r_hat, u_hat) flat arrays with r = D u + V u - K f(|u|) u."""
    u_phys = to_physical(u)
    uf = to_frequency(u)
    grid = u.grid
    kx, ky, kz = grid.modes
    mod = kernels.abs4(u_phys.flat)
    pt = model.V[:, None] * u_phys.flat - model.nonlin_field(mod, u_phys.flat)
    pt_hat = np.fft.fftn(pt.reshape(u_phys.data.shape), axes=(0, 1, 2)) \
        .reshape(-1, 4) * grid.dft_scale
    r_hat = kernels.dirac_apply(uf.flat, kx, ky, kz, model.a) + pt_hat
    return np.ascontiguousarray(r_hat), uf.flat


def nehari_residual(u: SpinorField, model: ProblemModel) -> NehariResidual:
    """Derivative along u and the dual norm of the E- restriction."""
    grid = u.grid
    lam = lambda_table(grid, model.a)
    kx, ky, kz = grid.modes
    r_hat, u_hat = _dual_residual_freq(u, model)
    ones = np.ones_like(lam)
    r_self = kernels.weighted_inner(ones, r_hat, u_hat)
    g_hat = np.ascontiguousarray(r_hat / lam[:, None])
    _, gm = kernels.split_pm(g_hat, kx, ky, kz, lam, model.a)
    r_minus = float(np.sqrt(max(kernels.weighted_norm2(lam, gm), 0.0)))
    return NehariResidual(r_self, r_minus)


def criticality_residual(u: SpinorField, model: ProblemModel) -> float:
    """Dual norm of the full derivative: sqrt(sum |r_hat|^2 / lambda)."""
    lam = lambda_table(u.grid, model.a)
    r_hat, _ = _dual_residual_freq(u, model)
    return float(np.sqrt(max(kernels.weighted_norm2(1.0 / lam, r_hat), 0.0)))


class _FiberProblem:
    """Cached tables for maximizing gamma_u at fixed direction u.

    Holds the positive part in both representations plus the pointwise
    quadratic-form arrays that make every 1-D search FFT-free.
    """

    def __init__(self, grid: Grid, model: ProblemModel,
                 Ap: ComplexArr, Af: ComplexArr,
                 mask: FloatArr | None) -> None:
        self.grid = grid
        self.model = model
        self.Ap = Ap
        self.Af = Af
        self.mask = mask
        self.lam = lambda_table(grid, model.a)
        self.kx, self.ky, self.kz = grid.modes
        self.shape = (grid.n,) * 3 + (4,)
        self.Q = kernels.weighted_norm2(self.lam, Af)
        self.A2 = kernels.abs4(Ap) ** 2
        self.P_A = float(model.Vw @ self.A2)

    def g_t(self, t: float, B: FloatArr, C: FloatArr, P_B: float) -> float:
        """d/dt gamma at (t, v) through the quadratic-form tables."""
        return (t * (self.Q + self.P_A) + P_B
                - self.model.nonlin_g_sum(C, B, self.A2, t))

    def value(self, t: float, B: FloatArr, C: FloatArr, R: float) -> float:
        pot = 0.5 * float(self.model.Vw @ (t * t * self.A2 + 2.0 * t * B + C))
        return (0.5 * t * t * self.Q - 0.5 * R + pot
                - self.model.nonlin_F_sum(C, B, self.A2, t))

    def solve_t(self, t_prev: float, B: FloatArr, C: FloatArr) -> float:
        """Maximize gamma over t >= 0 at fixed v.

        Root-find on the t-derivative; brackets grow geometrically and a
        coarse scan guards against multiple sign changes, since global
        concavity in t is not assumed.
        """
        P_B = float(self.model.Vw @ B)

        def g(t: float) -> float:
            return self.g_t(t, B, C, P_B)

        if t_prev > 0:
            lo, hi = 0.5 * t_prev, 2.0 * t_prev
            if g(lo) > 0.0 and g(hi) < 0.0:
                root = float(brentq(g, lo, hi, xtol=1e-13, rtol=1e-15))
                return root

        t_hi = 2.0
        while g(t_hi) > 0.0 and t_hi < 2.0 ** 20:
            t_hi *= 2.0
        ts = np.linspace(0.0, t_hi, 33)
        gs = np.array([g(t) for t in ts])
        roots: list[float] = []
        for i in range(len(ts) - 1):
            if gs[i] > 0.0 and gs[i + 1] <= 0.0:
                roots.append(float(brentq(g, ts[i], ts[i + 1],
                                          xtol=1e-13, rtol=1e-15)))
        if not roots:
            # derivative has one sign on the whole bracket
            return 0.0 if gs[0] <= 0.0 else t_hi
        if len(roots) == 1:
            return roots[0]
        vals = [self.value(r, B, C, 0.0) for r in roots]
        return roots[int(np.argmax(vals))]

    def ascend(self, t0: float, vp: ComplexArr, vf: ComplexArr,
               tol: float, max_iter: int, suff: float
               ) -> tuple[float, ComplexArr, ComplexArr, float, int, float]:
        """Alternate t-maximization and quasi-Newton v-ascent until both
        residuals pass.

        The map v -> max_t gamma(t, v) is strictly concave, so curvature
        pairs always have the right sign and a limited-memory recursion
        in the graph metric turns the preconditioned gradient into steps
        that survive the late phase, where value differences drop below
        evaluation noise and a plain line search goes blind. Each
        iteration costs one forward and one inverse transform; line
        search probes stay pointwise.

        Returns (t, vp, vf, value, iterations, residual_minus).
        """
        model, lam = self.model, self.lam
        scale_fft = self.grid.dft_scale
        t = t0
        res_minus = np.inf
        hist: list[tuple[ComplexArr, ComplexArr, float]] = []
        prev_vf: ComplexArr | None = None
        prev_g: ComplexArr | None = None

        def dot(x: ComplexArr, y: ComplexArr) -> float:
            return kernels.weighted_inner(lam, np.ascontiguousarray(x),
                                          np.ascontiguousarray(y))

        for it in range(1, max_iter + 1):
            B = _rowdot_re(vp, self.Ap)
            C = _rowdot_re(vp, vp)
            t = self.solve_t(t, B, C)

            wp = t * self.Ap + vp
            wf = t * self.Af + vf
            mod = kernels.abs4(wp)
            pt = model.V[:, None] * wp - model.nonlin_field(mod, wp)
            pt_hat = np.fft.fftn(pt.reshape(self.shape), axes=(0, 1, 2)) \
                .reshape(-1, 4) * scale_fft
            r_hat = kernels.dirac_apply(wf, self.kx, self.ky, self.kz,
                                        model.a) + pt_hat
            g_hat = np.ascontiguousarray(r_hat / lam[:, None])
            _, g_f = kernels.split_pm(g_hat, self.kx, self.ky, self.kz,
                                      lam, model.a)
            if self.mask is not None:
                g_f = np.ascontiguousarray(g_f * self.mask[:, None])
            gdd = kernels.weighted_norm2(lam, g_f)
            res_minus = float(np.sqrt(max(gdd, 0.0)))

            R = kernels.weighted_norm2(lam, vf)
            nrm_w = np.sqrt(max(t * t * self.Q + R, 0.0))
            scale = max(1.0, nrm_w)
            if res_minus <= tol * scale:
                P_B = float(model.Vw @ B)
                if abs(self.g_t(t, B, C, P_B)) <= tol * scale:
                    return t, vp, vf, self.value(t, B, C, R), it, res_minus

            if prev_vf is not None:
                sv = vf - prev_vf
                yv = prev_g - g_f
                sy = dot(sv, yv)
                if sy > 1e-12 * np.sqrt(max(dot(sv, sv) * dot(yv, yv),
                                            1e-300)):
                    hist.append((sv, yv, 1.0 / sy))
                    if len(hist) > 8:
                        hist.pop(0)
            prev_vf, prev_g = vf.copy(), g_f.copy()

            q = g_f.copy()
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
            d_f = q
            slope = dot(g_f, d_f)
            if not np.isfinite(slope) or slope <= 0:
                d_f = g_f
                slope = gdd
                hist.clear()

            d_p = np.fft.ifftn(d_f.reshape(self.shape), axes=(0, 1, 2)) \
                .reshape(-1, 4) / scale_fft
            d_p = np.ascontiguousarray(d_p)
            E1 = _rowdot_re(d_p, self.Ap)
            D1 = _rowdot_re(d_p, vp)
            D2 = _rowdot_re(d_p, d_p)
            c0w = t * t * self.A2 + 2.0 * t * B + C
            c1w = t * E1 + D1
            gvd = kernels.weighted_inner(lam, vf, np.ascontiguousarray(d_f))
            ddd = kernels.weighted_norm2(lam, np.ascontiguousarray(d_f))
            lin = t * float(model.Vw @ E1) + float(model.Vw @ D1) - gvd
            quad = 0.5 * (float(model.Vw @ D2) - ddd)
            F0 = model.nonlin_F_sum(c0w, c1w, D2, 0.0)

            def phi(s: float) -> float:
                return (s * lin + s * s * quad
                        - (model.nonlin_F_sum(c0w, c1w, D2, s) - F0))

            # increases below the evaluation noise of gamma cannot be
            # certified; such steps are accepted as long as the value
            # does not measurably drop
            noise = 1e-14 * max(1.0, abs(F0))
            s = 1.0
            while s > 1e-14:
                ph = phi(s)
                if ph >= suff * s * slope or ph >= -noise:
                    break
                s *= 0.5
            if s > 1e-14:
                vp = vp + s * d_p
                vf = vf + s * d_f

        B = _rowdot_re(vp, self.Ap)
        C = _rowdot_re(vp, vp)
        R = kernels.weighted_norm2(lam, vf)
        raise MaxIterationsError(
            f"fiber maximization did not converge in {max_iter} iterations "
            f"(residual {res_minus:.3e})",
            best=(t, vp, vf, self.value(t, B, C, R)))


def inner_maximize(u: SpinorField, model: ProblemModel,
                   opts: InnerOptions | None = None,
                   warm_start: NehariPoint | None = None,
                   v_mode_mask: FloatArr | None = None
                   ) -> tuple[NehariPoint, float, int]:
    """Maximize Phi over the fiber of u; returns (point, value, iterations).

    Multiple independent starts must agree within ``opts.unique_tol``
    (the discrete form of maximizer uniqueness); disagreement raises
    UniquenessError. A warm start replaces the default initial point.
    """
    opts = opts or InnerOptions()
    grid = u.grid
    up, um = project_pm(u, model.a)
    upf, umf = to_frequency(up), to_frequency(um)
    norm_plus = graph_norm(up, model.a)
    if norm_plus <= 1e-14 * max(1.0, graph_norm(u, model.a)):
        raise DegenerateFiberError("direction has no positive spectral part")

    prob = _FiberProblem(grid, model,
                         np.ascontiguousarray(to_physical(up).flat),
                         np.ascontiguousarray(upf.flat), v_mode_mask)
    lam = prob.lam
    rng = np.random.default_rng(opts.seed)

    def initial(i: int) -> tuple[float, ComplexArr]:
        if i == 0 and warm_start is not None:
            return warm_start.t, to_frequency(warm_start.v).flat.copy()
        vmf = umf.flat.copy()
        if i == 0:
            return 1.0, vmf
        pert = rng.standard_normal(vmf.shape) + 1j * rng.standard_normal(vmf.shape)
        _, pm = kernels.split_pm(np.ascontiguousarray(pert),
                                 prob.kx, prob.ky, prob.kz, lam, model.a)
        pn = np.sqrt(max(kernels.weighted_norm2(lam, pm), 1e-300))
        vmf = vmf + (0.3 * norm_plus / pn) * pm
        return float(rng.uniform(0.5, 2.0)), vmf

    results = []
    failures: list[MaxIterationsError] = []
    for i in range(opts.starts):
        t0, vf = initial(i)
        if v_mode_mask is not None:
            vf = np.ascontiguousarray(vf * v_mode_mask[:, None])
        vp = np.fft.ifftn(vf.reshape(prob.shape), axes=(0, 1, 2)) \
            .reshape(-1, 4) / grid.dft_scale
        vp = np.ascontiguousarray(vp)
        try:
            results.append(prob.ascend(t0, vp, vf, opts.tol_inner,
                                       opts.max_iter, opts.suff_increase))
        except MaxIterationsError as exc:
            failures.append(exc)

    if not results:
        raise failures[0]

    best = max(results, key=lambda r: r[3])
    t_b, _, vf_b, val_b, iters_b, _ = best
    for r in results:
        dt = abs(r[0] - t_b)
        dv = np.sqrt(max(kernels.weighted_norm2(
            lam, np.ascontiguousarray(r[2] - vf_b)), 0.0))
        vnorm = np.sqrt(max(kernels.weighted_norm2(lam, vf_b), 0.0))
        if dt > opts.unique_tol * max(1.0, t_b) \
                or dv > opts.unique_tol * max(1.0, vnorm):
            raise UniquenessError(
                f"fiber starts disagree: dt={dt:.3e}, dv={dv:.3e} "
                f"(values {r[3]:.6e} vs {val_b:.6e})")

    v_field = SpinorField(grid, "frequency",
                          np.ascontiguousarray(vf_b.reshape(prob.shape)))
    return NehariPoint(t_b, v_field), val_b, iters_b


def fiber_point_field(u: SpinorField, point: NehariPoint,
                      model: ProblemModel) -> SpinorField:
    """Assemble t u+ + v as a frequency-representation field."""
    up, _ = project_pm(u, model.a)
    upf = to_frequency(up)
    vf = to_frequency(point.v)
    return SpinorField(u.grid, "frequency",
                       np.ascontiguousarray(point.t * upf.data + vf.data))


def estimate_embedding_constant(grid: Grid, a: float, p: float,
                                seed: int = 0, iters: int = 60,
                                starts: int = 3) -> float:
    """Numerical estimate of sup ||u||_Lp / ||u|| over the discrete E+.

    Fixed-point ascent of the Rayleigh-type ratio; the supremum is
    approached from below, so a small safety factor is applied.
    """
    lam = lambda_table(grid, a)
    kx, ky, kz = grid.modes
    shape = (grid.n,) * 3 + (4,)
    scale_fft = grid.dft_scale
    rng = np.random.default_rng(seed)
    best = 0.0
    w = grid.cell_volume
    for _ in range(starts):
        uf = rng.standard_normal((grid.n ** 3, 4)) \
            + 1j * rng.standard_normal((grid.n ** 3, 4))
        uf, _ = kernels.split_pm(np.ascontiguousarray(uf), kx, ky, kz, lam, a)
        uf = uf / np.sqrt(max(kernels.weighted_norm2(lam, uf), 1e-300))
        for _ in range(iters):
            upx = np.fft.ifftn(uf.reshape(shape), axes=(0, 1, 2)) \
                .reshape(-1, 4) / scale_fft
            mod = kernels.abs4(np.ascontiguousarray(upx))
            lp = (w * np.sum(mod ** p)) ** (1.0 / p)
            best = max(best, lp)
            # dual of the Lp-norm gradient, restricted to E+
            gx = (w * mod ** (p - 2.0))[:, None] * upx
            gf = np.fft.fftn(gx.reshape(shape), axes=(0, 1, 2)) \
                .reshape(-1, 4) * scale_fft
            gf = np.ascontiguousarray(gf / lam[:, None])
            gf, _ = kernels.split_pm(gf, kx, ky, kz, lam, a)
            nrm = np.sqrt(max(kernels.weighted_norm2(lam, gf), 1e-300))
            uf = np.ascontiguousarray(gf / nrm)
    return 1.05 * best


def mountain_pass_constants(model: ProblemModel, emb_C: float, p: float
                            ) -> tuple[float, float]:
    """Radius rho and floor alpha with Phi >= alpha on the E+ sphere of
    radius rho.

    From F(t) <= eps t^2 + A t^p and the embedding bounds,
    Phi(u) >= rho^2/2 - C eps rho^2 - C A rho^(p-2) rho^2 on ||u|| = rho.
    With eps = 1/(4C) the lower-bound curve is rho^2/4 - C A rho^p; its
    interior maximizer gives a strictly positive floor.
    """
    if not 2.0 < p < 3.0:
        raise ValueError("p must lie in (2, 3)")
    if emb_C <= 0:
        raise ValueError("embedding constant must be positive")
    k_max = float(np.max(model.K))
    big_c = max(k_max / model.a, k_max * emb_C ** p)
    a_eps = 1.0 / p
    rho = (1.0 / (2.0 * p * big_c * a_eps)) ** (1.0 / (p - 2.0))
    alpha = rho * rho * (0.25 - 1.0 / (2.0 * p))
    return rho, alpha


def reduced_value(w: SpinorField, model: ProblemModel,
                  opts: InnerOptions | None = None,
                  warm_start: NehariPoint | None = None
                  ) -> tuple[float, NehariPoint]:
    """m(w) = max over the fiber of w; w must be a unit E+ field."""
    point, value, _ = inner_maximize(w, model, opts, warm_start)
    return value, point


def reduced_gradient(w: SpinorField, point: NehariPoint,
                     model: ProblemModel) -> SpinorField:
    """Graph-dual gradient of the reduced functional, tangent at w.

    Equals t_w times the E+ dual gradient of Phi at t_w w + v_w with its
    component along w removed; frequency representation.
    """
    grid = w.grid
    lam = lambda_table(grid, model.a)
    kx, ky, kz = grid.modes
    u_w = fiber_point_field(w, point, model)
    r_hat, _ = _dual_residual_freq(u_w, model)
    g_hat = np.ascontiguousarray(r_hat / lam[:, None])
    gp, _ = kernels.split_pm(g_hat, kx, ky, kz, lam, model.a)
    wf = to_frequency(w).flat
    coeff = kernels.weighted_inner(lam, gp, wf)
    wnorm2 = kernels.weighted_norm2(lam, wf)
    tan = point.t * (gp - (coeff / wnorm2) * wf)
    return SpinorField(grid, "frequency",
                       np.ascontiguousarray(tan.reshape((grid.n,) * 3 + (4,))))
