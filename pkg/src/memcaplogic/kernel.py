"""Backend selection for the RK4 segment kernel.

The compiled Cython extension is used when it was built; otherwise the
pure-Python mirror is loaded. :func:`use_backend` switches explicitly (tests
and benchmarks use it to compare the two).
"""

from __future__ import annotations

import logging
from types import ModuleType

from . import _kernel_py

logger = logging.getLogger(__name__)

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None
    logger.debug("compiled kernel unavailable, using pure-Python fallback")

_BACKENDS: dict[str, ModuleType | None] = {"cython": _compiled, "python": _kernel_py}
_active: ModuleType = _compiled if _compiled is not None else _kernel_py


def available_backends() -> list[str]:
    return [name for name, mod in _BACKENDS.items() if mod is not None]


def backend() -> str:
    """Name of the backend currently in use."""
    return "cython" if _active is _compiled and _compiled is not None else "python"


def use_backend(name: str) -> str:
    """Select ``"cython"`` or ``"python"``; returns the previously active name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    mod = _BACKENDS[name]
    if mod is None:
        raise RuntimeError(f"backend {name!r} is not available (extension not built)")
    previous = backend()
    _active = mod
    return previous


def run_segment(*args):
    return _active.run_segment(*args)


def derivative(*args):
    return _active.derivative(*args)
