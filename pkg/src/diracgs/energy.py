"""The action functional, its breakdown, and its first derivative.

The functional is

    Phi(u) = (|u+|^2 - |u-|^2)/2 + (1/2) int V |u|^2 - int K F(|u|)

with the graph norm on the spectral parts and grid quadrature
sum(.) dx^3 for the integrals. The derivative is carried as the strong
L^2 residual r = D u + V u - K f(|u|) u, so that Phi'(u)v = <r, v>_L2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .field import (SpinorField, apply_dirac, lambda_table, l2_inner,
                    to_frequency, to_physical)
from .model import ProblemModel


@dataclass(frozen=True)
class EnergyBreakdown:
    quad_plus: float
    quad_minus: float
    pot: float
    nonlin: float
    total: float


def _quad_parts(u: SpinorField, model: ProblemModel) -> tuple[float, float]:
    """(|u+|^2/2, |u-|^2/2) without forming the projections.

    Uses sum lam |u_hat|^2 = |u+|^2 + |u-|^2 and
    Re<u_hat, D_hat u_hat> = |u+|^2 - |u-|^2.
    """
    uf = to_frequency(u)
    kx, ky, kz = u.grid.modes
    lam = lambda_table(u.grid, model.a)
    du = kernels.dirac_apply(uf.flat, kx, ky, kz, model.a)
    s1 = kernels.weighted_norm2(lam, uf.flat)
    ones = np.ones_like(lam)
    s2 = kernels.weighted_inner(ones, uf.flat, du)
    return 0.25 * (s1 + s2), 0.25 * (s1 - s2)


def energy(u: SpinorField, model: ProblemModel) -> EnergyBreakdown:
    if u.grid != model.grid:
        raise ValueError("field and model live on different grids")
    qp, qm = _quad_parts(u, model)
    up = to_physical(u)
    mod = kernels.abs4(up.flat)
    pot = 0.5 * float(model.Vw @ (mod * mod))
    nonlin = float(model.Kw @ model.nl.F_arr(mod))
    return EnergyBreakdown(qp, qm, pot, nonlin, qp - qm + pot - nonlin)


def residual_l2(u: SpinorField, model: ProblemModel) -> SpinorField:
    """Strong-form residual r = D u + V u - K f(|u|) u, physical values."""
    up = to_physical(u)
    du = to_physical(apply_dirac(u, model.a))
    mod = kernels.abs4(up.flat)
    r = du.data.reshape(-1, 4) + model.V[:, None] * up.flat \
        - model.nonlin_field(mod, up.flat)
    return SpinorField(u.grid, "physical",
                       np.ascontiguousarray(r.reshape(u.data.shape)))


def derivative_along(u: SpinorField, v: SpinorField, model: ProblemModel) -> float:
    """Phi'(u)v as the L^2 pairing of the residual with v."""
    return l2_inner(residual_l2(u, model), to_physical(v))


def nehari_identity_gap(u: SpinorField, model: ProblemModel) -> float:
    """Phi(u) - Phi'(u)u/2 - int K (f(|u|)|u|^2/2 - F(|u|)); zero analytically."""
    total = energy(u, model).total
    half_du = 0.5 * derivative_along(u, u, model)
    up = to_physical(u)
    mod = kernels.abs4(up.flat)
    integral = float(model.Kw @ (0.5 * model.nl.f_arr(mod) * mod * mod
                                 - model.nl.F_arr(mod)))
    return total - half_du - integral
