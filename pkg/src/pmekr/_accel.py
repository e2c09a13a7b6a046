"""Numba switch for the hot kernels.

Kernels in :mod:`pmekr.kernels` come in two flavours: a numba-compiled loop
version and a pure numpy / pure Python fallback.  Which one is used is decided
once, at import time:

* ``PMEKR_DISABLE_NUMBA=1`` forces the fallback;
* otherwise numba is used when it can be imported.

Tests and the benchmark can flip between paths at runtime with
:func:`set_backend`.
"""

from __future__ import annotations

import os

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def _env_disabled() -> bool:
    return os.environ.get("PMEKR_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


_use_numba = HAVE_NUMBA and not _env_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def use_numba() -> bool:
    return _use_numba


def backend() -> str:
    return "numba" if _use_numba else "numpy"


def set_backend(name: str) -> None:
    """Select ``"numba"`` or ``"numpy"`` for subsequent kernel calls."""
    global _use_numba
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _use_numba = name == "numba"
