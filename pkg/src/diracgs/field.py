"""Spinor fields on a periodic box and their spectral operations.

A field lives on the uniform grid of [-L, L)^3 with n points per axis
and carries a representation tag: ``physical`` holds values u(x),
``frequency`` holds DFT coefficients u_hat(k). The DFT normalization is
fixed so that sum_x |u|^2 dx^3 == sum_k |u_hat|^2 exactly, which makes
every norm representation independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from . import kernels
from .errors import GridMismatchError, ReprMismatchError

Repr = Literal["physical", "frequency"]
ComplexArr = NDArray[np.complex128]
FloatArr = NDArray[np.float64]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid, n points per axis on [-L, L)^3."""

    n: int
    L: float

    def __post_init__(self) -> None:
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError("n must be even and at least 8")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx ** 3

    @property
    def dft_scale(self) -> float:
        # makes sum_k |u_hat|^2 equal sum_x |u|^2 dx^3
        return self.dx ** 1.5 / self.n ** 1.5

    @cached_property
    def x1d(self) -> FloatArr:
        return -self.L + self.dx * np.arange(self.n, dtype=np.float64)

    @cached_property
    def k1d(self) -> FloatArr:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @cached_property
    def modes(self) -> tuple[FloatArr, FloatArr, FloatArr]:
        """Flattened (kx, ky, kz) tables over all n^3 modes, x-axis slowest."""
        kx, ky, kz = np.meshgrid(self.k1d, self.k1d, self.k1d, indexing="ij")
        return (np.ascontiguousarray(kx.ravel()),
                np.ascontiguousarray(ky.ravel()),
                np.ascontiguousarray(kz.ravel()))

    @cached_property
    def radii(self) -> FloatArr:
        """Flattened |x| table matching the field layout."""
        x, y, z = np.meshgrid(self.x1d, self.x1d, self.x1d, indexing="ij")
        return np.sqrt(x * x + y * y + z * z).ravel()


@lru_cache(maxsize=32)
def lambda_table(grid: Grid, a: float) -> FloatArr:
    """Flattened sqrt(a^2 + |k|^2) over all modes."""
    kx, ky, kz = grid.modes
    lam = np.sqrt(a * a + kx * kx + ky * ky + kz * kz)
    lam.flags.writeable = False
    return lam


@dataclass(frozen=True)
class SpinorField:
    """Immutable 4-component field; data has shape (n, n, n, 4)."""

    grid: Grid
    repr: Repr
    data: ComplexArr

    def __post_init__(self) -> None:
        n = self.grid.n
        if self.data.shape != (n, n, n, 4):
            raise ValueError(f"data shape {self.data.shape} does not match n={n}")
        if self.data.dtype != np.complex128 or not self.data.flags.c_contiguous:
            raise ValueError("data must be C-contiguous complex128")
        self.data.flags.writeable = False

    @property
    def flat(self) -> ComplexArr:
        """(n^3, 4) view of the data."""
        return self.data.reshape(-1, 4)


def make_field(grid: Grid, data: ComplexArr, repr: Repr = "physical") -> SpinorField:
    arr = np.ascontiguousarray(data, dtype=np.complex128)
    if arr is data or arr.base is data:
        arr = arr.copy()
    return SpinorField(grid, repr, arr)


def zero_field(grid: Grid, repr: Repr = "physical") -> SpinorField:
    return SpinorField(grid, repr, np.zeros((grid.n,) * 3 + (4,), dtype=np.complex128))


def random_field(grid: Grid, rng: np.random.Generator,
                 repr: Repr = "physical", scale: float = 1.0) -> SpinorField:
    shape = (grid.n,) * 3 + (4,)
    data = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return SpinorField(grid, repr, np.ascontiguousarray(scale * data))


def _check_same_grid(u: SpinorField, v: SpinorField) -> None:
    if u.grid != v.grid:
        raise GridMismatchError(f"grids differ: {u.grid} vs {v.grid}")


def dft_forward(u: SpinorField) -> SpinorField:
    """Physical values to frequency coefficients."""
    if u.repr != "physical":
        raise ReprMismatchError("dft_forward expects a physical-representation field")
    hat = np.fft.fftn(u.data, axes=(0, 1, 2)) * u.grid.dft_scale
    return SpinorField(u.grid, "frequency", np.ascontiguousarray(hat))


def dft_inverse(u: SpinorField) -> SpinorField:
    """Frequency coefficients to physical values."""
    if u.repr != "frequency":
        raise ReprMismatchError("dft_inverse expects a frequency-representation field")
    phys = np.fft.ifftn(u.data, axes=(0, 1, 2)) / u.grid.dft_scale
    return SpinorField(u.grid, "physical", np.ascontiguousarray(phys))


def to_frequency(u: SpinorField) -> SpinorField:
    return u if u.repr == "frequency" else dft_forward(u)


def to_physical(u: SpinorField) -> SpinorField:
    return u if u.repr == "physical" else dft_inverse(u)


def project_pm(u: SpinorField, a: float) -> tuple[SpinorField, SpinorField]:
    """Split into the positive/negative spectral parts of the Dirac operator.

    Returned fields are in the representation of the input.
    """
    uf = to_frequency(u)
    kx, ky, kz = u.grid.modes
    lam = lambda_table(u.grid, a)
    up, um = kernels.split_pm(uf.flat, kx, ky, kz, lam, a)
    shape = uf.data.shape
    fp = SpinorField(u.grid, "frequency", up.reshape(shape))
    fm = SpinorField(u.grid, "frequency", um.reshape(shape))
    if u.repr == "physical":
        return dft_inverse(fp), dft_inverse(fm)
    return fp, fm


def apply_dirac(u: SpinorField, a: float) -> SpinorField:
    """Apply -i alpha.grad + a beta (diagonal per Fourier mode)."""
    uf = to_frequency(u)
    kx, ky, kz = u.grid.modes
    out = kernels.dirac_apply(uf.flat, kx, ky, kz, a)
    res = SpinorField(u.grid, "frequency", out.reshape(uf.data.shape))
    return dft_inverse(res) if u.repr == "physical" else res


def graph_inner(u: SpinorField, v: SpinorField, a: float) -> float:
    """sum_k lambda(k) Re(u_hat . conj(v_hat))."""
    _check_same_grid(u, v)
    uf, vf = to_frequency(u), to_frequency(v)
    return kernels.weighted_inner(lambda_table(u.grid, a), uf.flat, vf.flat)


def graph_norm(u: SpinorField, a: float) -> float:
    uf = to_frequency(u)
    return float(np.sqrt(max(kernels.weighted_norm2(lambda_table(u.grid, a), uf.flat), 0.0)))


def graph_normalize(u: SpinorField, a: float) -> SpinorField:
    nrm = graph_norm(u, a)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero field")
    uf = to_frequency(u)
    out = SpinorField(u.grid, "frequency", np.ascontiguousarray(uf.data / nrm))
    return dft_inverse(out) if u.repr == "physical" else out


def l2_inner(u: SpinorField, v: SpinorField) -> float:
    """Real L^2 pairing; representation independent by Parseval."""
    _check_same_grid(u, v)
    if u.repr != v.repr:
        raise ReprMismatchError("l2_inner needs both fields in one representation")
    w = u.grid.cell_volume if u.repr == "physical" else 1.0
    s = np.sum(u.data.real * v.data.real) + np.sum(u.data.imag * v.data.imag)
    return float(w * s)


def l2_norm(u: SpinorField) -> float:
    return float(np.sqrt(max(l2_inner(u, u), 0.0)))


def lq_norm(u: SpinorField, q: float) -> float:
    """(sum_x |u(x)|^q dx^3)^(1/q) on the physical values."""
    if q < 1:
        raise ValueError("q must be at least 1")
    up = to_physical(u)
    mod = kernels.abs4(up.flat)
    return float((u.grid.cell_volume * np.sum(mod ** q)) ** (1.0 / q))
