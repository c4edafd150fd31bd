"""Backend selection for the path kernels.

The numba lane is the default; set BETLAB_BACKEND=numpy to force the pure
numpy fallback (same semantics, slower). Both lanes expose the same function
set; ``set_backend`` swaps them at runtime for tests and benchmarks.
"""

from __future__ import annotations

import os
import warnings

from . import numpy_backend

_BACKENDS = {"numpy": numpy_backend}
_requested = os.environ.get("BETLAB_BACKEND", "").strip().lower()

try:
    from . import numba_backend

    _BACKENDS["numba"] = numba_backend
except ImportError as exc:  # pragma: no cover - depends on environment
    if _requested == "numba":
        raise
    warnings.warn(f"numba backend unavailable ({exc}); falling back to numpy kernels")

if _requested:
    if _requested not in _BACKENDS:
        raise ValueError(f"BETLAB_BACKEND={_requested!r}; expected one of {sorted(_BACKENDS)}")
    _active = _BACKENDS[_requested]
else:
    _active = _BACKENDS.get("numba", numpy_backend)


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def active():
    """Module implementing the currently selected kernel lane."""
    return _active


def active_name() -> str:
    return _active.NAME


def get_backend(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; expected one of {sorted(_BACKENDS)}") from None


def set_backend(name: str) -> None:
    global _active
    _active = get_backend(name)
