"""Selection between the compiled and pure-Python simulation cores.

The compiled kernel is used when it imported cleanly and every reaction in
the network carries a coded propensity descriptor.  Set
``MF_INFER_PURE_PYTHON=1`` to force the fallback; both cores produce
bit-identical trajectories.
"""

from __future__ import annotations

import os

from . import _core_py

try:
    from . import _core as _compiled
except ImportError:  # pragma: no cover - depends on build availability
    _compiled = None


def _forced_pure_python() -> bool:
    return os.environ.get("MF_INFER_PURE_PYTHON", "") not in ("", "0")


def compiled_available() -> bool:
    return _compiled is not None


def active_backend() -> str:
    if compiled_available() and not _forced_pure_python():
        return "compiled"
    return "python"


def get_core(backend: str | None = None):
    """Return the core module for ``backend`` (None selects automatically)."""
    if backend is None:
        backend = active_backend()
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled core requested but not available")
        return _compiled
    if backend == "python":
        return _core_py
    raise ValueError(f"unknown backend {backend!r}")
