"""Kernel backend selection.

Imports the compiled propagation kernel when available, otherwise the numpy
fallback.  Set the environment variable ``FLOQSPIN_PURE=1`` to force the
fallback (used by the benchmark and for debugging).
"""

from __future__ import annotations

import os

from . import fallback

BACKEND: str

if os.environ.get("FLOQSPIN_PURE", "").strip() not in ("", "0"):
    propagate_grid = fallback.propagate_grid
    BACKEND = "python"
else:
    try:
        from ._kernels import propagate_grid  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        propagate_grid = fallback.propagate_grid
        BACKEND = "python"


def get_kernel(backend: str | None = None):
    """Return the propagate_grid kernel for an explicit backend choice.

    backend: "compiled", "python", or None for the import-time default.
    """
    if backend is None:
        return propagate_grid
    if backend == "python":
        return fallback.propagate_grid
    if backend == "compiled":
        from ._kernels import propagate_grid as compiled

        return compiled
    raise ValueError(f"unknown backend {backend!r}")
