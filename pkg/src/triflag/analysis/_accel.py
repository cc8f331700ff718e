"""Backend selection for the hot Monte-Carlo kernels.

``TRIFLAG_NUMBA=0`` (or ``false``/``off``) forces the vectorized numpy path.
The numba path is used by default when numba imports.
"""

from __future__ import annotations

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

_env = os.environ.get("TRIFLAG_NUMBA", "1").strip().lower()
_backend = "numba" if numba is not None and _env not in ("0", "false", "no", "off") else "numpy"


def njit(*args, **kwargs):
    """numba.njit when available, identity otherwise."""
    if numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and numba is None:
        raise RuntimeError("numba is not installed")
    _backend = name
