"""Pure-numpy implementations of the hot kernels.

Every function here has a signature-identical twin in the compiled
``_fast`` extension; arrays are flat over modes/grid points with the
spinor index last. This module is the fallback when the extension is
missing and the reference the extension is tested against.
"""

import numpy as np
from numpy.typing import NDArray

ComplexArr = NDArray[np.complex128]
FloatArr = NDArray[np.float64]


def abs4(u: ComplexArr) -> FloatArr:
    """Pointwise Euclidean modulus of a 4-component complex field."""
    return np.sqrt(np.einsum("mc,mc->m", u.real, u.real)
                   + np.einsum("mc,mc->m", u.imag, u.imag))


def dirac_apply(u: ComplexArr, kx: FloatArr, ky: FloatArr, kz: FloatArr,
                a: float) -> ComplexArr:
    """Apply the frequency-domain Dirac symbol k.alpha + a*beta per mode."""
    u1, u2, u3, u4 = u[:, 0], u[:, 1], u[:, 2], u[:, 3]
    km = kx - 1j * ky
    kp = kx + 1j * ky
    out = np.empty_like(u)
    out[:, 0] = a * u1 + kz * u3 + km * u4
    out[:, 1] = a * u2 + kp * u3 - kz * u4
    out[:, 2] = kz * u1 + km * u2 - a * u3
    out[:, 3] = kp * u1 - kz * u2 - a * u4
    return out


def split_pm(u: ComplexArr, kx: FloatArr, ky: FloatArr, kz: FloatArr,
             lam: FloatArr, a: float) -> tuple[ComplexArr, ComplexArr]:
    """Split into positive/negative spectral parts: (u +- Du/lam)/2."""
    du = dirac_apply(u, kx, ky, kz, a)
    du /= lam[:, None]
    up = 0.5 * (u + du)
    um = 0.5 * (u - du)
    return up, um


def weighted_inner(w: FloatArr, u: ComplexArr, v: ComplexArr) -> float:
    """sum_m w_m * Re(u_m . conj(v_m)) over the 4 components."""
    s = np.einsum("m,mc,mc->", w, u.real, v.real)
    s += np.einsum("m,mc,mc->", w, u.imag, v.imag)
    return float(s)


def weighted_norm2(w: FloatArr, u: ComplexArr) -> float:
    """sum_m w_m * |u_m|^2 over the 4 components."""
    s = np.einsum("m,mc,mc->", w, u.real, u.real)
    s += np.einsum("m,mc,mc->", w, u.imag, u.imag)
    return float(s)


def scale4(s: FloatArr, u: ComplexArr) -> ComplexArr:
    """Multiply each 4-spinor by a real scalar field."""
    return s[:, None] * u


def pow_F_sum(kw: FloatArr, c0: FloatArr, c1: FloatArr, c2: FloatArr,
              t: float, p: float) -> float:
    """sum_m kw_m * s^p / p with s = sqrt(c0 + 2t c1 + t^2 c2)."""
    s2 = np.maximum(c0 + (2.0 * t) * c1 + (t * t) * c2, 0.0)
    return float(kw @ s2 ** (0.5 * p)) / p


def pow_g_sum(kw: FloatArr, c0: FloatArr, c1: FloatArr, c2: FloatArr,
              t: float, p: float) -> float:
    """sum_m kw_m * s^(p-2) * (c1 + t c2), the t-derivative integrand."""
    s2 = np.maximum(c0 + (2.0 * t) * c1 + (t * t) * c2, 0.0)
    return float(kw @ (s2 ** (0.5 * (p - 2.0)) * (c1 + t * c2)))


def pow_f_field(kw: FloatArr, s: FloatArr, u: ComplexArr, p: float) -> ComplexArr:
    """kw * s^(p-2) * u, the pointwise nonlinear term of the residual."""
    return (kw * s ** (p - 2.0))[:, None] * u
