"""Kernel backend selection.

The hot inner loops of the ZDD engine and the branch-and-bound search are
written as plain functions over numpy arrays in ``_kernels``. They can run
either compiled by numba (fast) or as ordinary Python (portable, debuggable).
The backend is chosen by the environment variable ``PHYLOZDD_BACKEND``:

    auto    use numba when importable, else python (default)
    numba   require numba, fail if missing
    python  never compile, run the kernels as plain Python
"""

from __future__ import annotations

import os
from types import SimpleNamespace

_CACHE: dict[str, SimpleNamespace] = {}


def backend_name(explicit: str | None = None) -> str:
    """Resolve the effective backend name ('numba' or 'python')."""
    choice = explicit or os.environ.get("PHYLOZDD_BACKEND", "auto")
    if choice not in ("auto", "numba", "python"):
        raise ValueError(f"unknown backend {choice!r} (use auto, numba or python)")
    if choice == "python":
        return "python"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise RuntimeError("PHYLOZDD_BACKEND=numba but numba is not importable")
        return "python"
    return "numba"


def get_kernels(explicit: str | None = None) -> SimpleNamespace:
    """Return the kernel namespace for the chosen backend (memoized)."""
    name = backend_name(explicit)
    ns = _CACHE.get(name)
    if ns is None:
        from . import _kernels

        if name == "numba":
            from numba import njit

            ns = SimpleNamespace(
                name="numba",
                **{k: njit(cache=True)(getattr(_kernels, k)) for k in _kernels.KERNELS},
            )
        else:
            ns = SimpleNamespace(
                name="python",
                **{k: getattr(_kernels, k) for k in _kernels.KERNELS},
            )
        _CACHE[name] = ns
    return ns
