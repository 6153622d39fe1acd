"""Pure numpy stencil kernels (fallback backend).

Each kernel evaluates ``out = alpha*u + beta*(lap(u) - lam*kill*u)`` where
``lap`` is the second-order reflection (insulated-wall) Laplacian, assembled
in face-flux form so the operator is exactly symmetric.
"""

from __future__ import annotations

import numpy as np


def _accumulate_fluxes(u: np.ndarray, weights) -> np.ndarray:
    d = np.zeros_like(u)
    for axis, w in enumerate(weights):
        lo = [slice(None)] * u.ndim
        hi = [slice(None)] * u.ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        lo, hi = tuple(lo), tuple(hi)
        flux = w * (u[hi] - u[lo])
        d[lo] += flux
        d[hi] -= flux
    return d


def _finish(out, u, kill, lam, alpha, beta, lap):
    np.multiply(u, alpha, out=out)
    out += beta * lap
    if lam != 0.0:
        out -= (beta * lam) * (u * kill)
    return out


def apply_shifted_1d(out, u, kill, lam, wx, alpha, beta):
    return _finish(out, u, kill, lam, alpha, beta, _accumulate_fluxes(u, (wx,)))


def apply_shifted_2d(out, u, kill, lam, wx, wy, alpha, beta):
    return _finish(out, u, kill, lam, alpha, beta, _accumulate_fluxes(u, (wx, wy)))


def apply_shifted_3d(out, u, kill, lam, wx, wy, wz, alpha, beta):
    return _finish(out, u, kill, lam, alpha, beta, _accumulate_fluxes(u, (wx, wy, wz)))
