"""Deterministic 1-D minimiser: coarse grid scan then golden-section refinement.

Used by both interferometer modules so their optima are computed the same way.
No randomness, so scans are reproducible bit-for-bit.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   tol: float = 1e-12, max_iter: int = 200) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on [lo, hi]; returns (x_min, f(x_min))."""
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        # relative to the bracket position: HOM delays are ~1e-15 s
        if abs(b - a) <= tol * (abs(a) + abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
    x = x1 if f1 <= f2 else x2
    return x, min(f1, f2)


def grid_golden_minimize(f: Callable[[float], float], lo: float, hi: float,
                         n_grid: int = 1024, vectorized: bool = False) -> tuple[float, float]:
    """Global-ish minimum of ``f`` on (lo, hi].

    The grid excludes ``lo`` itself because both estimators have a stationary
    point (infinite error) at zero.  Non-finite grid values are skipped; the
    bracket around the best grid point is then refined by golden section.
    With ``vectorized`` the grid is evaluated in one call on an ndarray.
    """
    xs = np.linspace(lo, hi, n_grid + 1)[1:]
    if vectorized:
        vals = np.asarray(f(xs), dtype=float)
    else:
        vals = np.array([f(float(x)) for x in xs])
    finite = np.isfinite(vals)
    if not finite.any():
        return float("nan"), math.inf
    vals = np.where(finite, vals, np.inf)
    i = int(np.argmin(vals))
    a = float(xs[i - 1]) if i > 0 else lo + (xs[0] - lo) * 1e-6
    b = float(xs[i + 1]) if i + 1 < len(xs) else float(xs[i])
    x, fx = golden_section(f, a, b)
    if not fx <= vals[i]:
        return float(xs[i]), float(vals[i])
    return x, fx
