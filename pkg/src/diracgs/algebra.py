"""Dirac matrices in the standard representation and the mode symbol.

Explicit 4x4 constant matrices, plus dense helpers used by tests and
diagnostics. The per-mode solver kernels use closed-form components
instead of these matrices; this module is the small, obviously-correct
reference they are checked against.
"""

import numpy as np
from numpy.typing import NDArray

ComplexMat = NDArray[np.complex128]

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)

BETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(np.complex128)

_Z2 = np.zeros((2, 2), dtype=np.complex128)
ALPHA = np.stack([np.block([[_Z2, SIGMA[j]], [SIGMA[j], _Z2]]) for j in range(3)])

I4 = np.eye(4, dtype=np.complex128)


def anticommutator(x: ComplexMat, y: ComplexMat) -> ComplexMat:
    return x @ y + y @ x


def dirac_symbol(k: NDArray[np.float64], a: float) -> ComplexMat:
    """Frequency-domain matrix k.alpha + a*beta for one mode k."""
    return k[0] * ALPHA[0] + k[1] * ALPHA[1] + k[2] * ALPHA[2] + a * BETA


def symbol_eigenvalue(k: NDArray[np.float64], a: float) -> float:
    """Positive eigenvalue sqrt(a^2 + |k|^2) of the mode symbol."""
    return float(np.sqrt(a * a + float(k @ k)))


def projector_pm(k: NDArray[np.float64], a: float) -> tuple[ComplexMat, ComplexMat]:
    """Spectral projectors (I +- D/lam)/2 onto the +-lam eigenspaces."""
    d = dirac_symbol(k, a)
    lam = symbol_eigenvalue(k, a)
    p = 0.5 * (I4 + d / lam)
    return p, I4 - p
