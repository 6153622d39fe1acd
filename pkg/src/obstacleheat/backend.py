"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the numpy
fallback is used.  Set ``OBSTACLEHEAT_BACKEND=numpy`` or ``=cython`` to force
a choice (forcing the compiled backend raises if it was not built).
"""

from __future__ import annotations

import os

import numpy as np

from . import _stencil_np

_requested = os.environ.get("OBSTACLEHEAT_BACKEND", "").strip().lower()

if _requested == "numpy":
    _impl = _stencil_np
    BACKEND_NAME = "numpy"
elif _requested in ("", "cython"):
    try:
        from . import _stencil_cy as _impl  # type: ignore[no-redef]

        BACKEND_NAME = "cython"
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "OBSTACLEHEAT_BACKEND=cython but the compiled extension is "
                "not available; reinstall with a C compiler or unset the "
                "variable"
            )
        _impl = _stencil_np
        BACKEND_NAME = "numpy"
else:
    raise ValueError(
        f"unknown OBSTACLEHEAT_BACKEND={_requested!r}; use 'cython' or 'numpy'"
    )


def backend_name() -> str:
    return BACKEND_NAME


def apply_shifted(out: np.ndarray, u: np.ndarray, kill: np.ndarray, lam: float,
                  inv_h2: tuple[float, ...], alpha: float, beta: float) -> np.ndarray:
    """Evaluate ``alpha*u + beta*(lap(u) - lam*kill*u)`` into ``out``.

    ``u``/``out`` are C-contiguous float64 arrays of matching shape, ``kill``
    a matching uint8 mask and ``inv_h2`` the per-axis weights ``1/h_k**2``.
    """
    if u.ndim == 1:
        _impl.apply_shifted_1d(out, u, kill, lam, inv_h2[0], alpha, beta)
    elif u.ndim == 2:
        _impl.apply_shifted_2d(out, u, kill, lam, inv_h2[0], inv_h2[1],
                               alpha, beta)
    elif u.ndim == 3:
        _impl.apply_shifted_3d(out, u, kill, lam, inv_h2[0], inv_h2[1],
                               inv_h2[2], alpha, beta)
    else:
        raise ValueError(f"unsupported dimension {u.ndim}")
    return out
