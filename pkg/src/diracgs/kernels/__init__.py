"""Kernel backend selection.

The compiled extension is preferred; the numpy module is the fallback.
Set ``DIRACGS_PURE=1`` before import to force the numpy backend.
"""

import os

from . import _ref

_KERNEL_NAMES = (
    "abs4",
    "dirac_apply",
    "split_pm",
    "weighted_inner",
    "weighted_norm2",
    "scale4",
    "pow_F_sum",
    "pow_g_sum",
    "pow_f_field",
)

if os.environ.get("DIRACGS_PURE") == "1":
    _impl = _ref
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref


def backend() -> str:
    """Name of the active backend: 'fast' or 'ref'."""
    return "fast" if _impl.__name__.endswith("_fast") else "ref"


def has_fast() -> bool:
    """Whether the compiled extension can be imported at all."""
    try:
        from . import _fast  # noqa: F401
    except ImportError:
        return False
    return True


def set_backend(name: str) -> None:
    """Switch backends at runtime; 'fast' requires the built extension."""
    global _impl
    if name == "ref":
        _impl = _ref
    elif name == "fast":
        from . import _fast
        _impl = _fast
    else:
        raise ValueError(f"unknown backend {name!r}")
    for attr in _KERNEL_NAMES:
        globals()[attr] = getattr(_impl, attr)


for _attr in _KERNEL_NAMES:
    globals()[_attr] = getattr(_impl, _attr)
del _attr
