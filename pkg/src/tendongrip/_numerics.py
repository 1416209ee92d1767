"""Small root-finding helpers."""

from __future__ import annotations

import numpy as np


def bisect(f, lo: float, hi: float, xtol: float = 1e-12, maxiter: int = 200) -> float:
    """Root of ``f`` on ``[lo, hi]`` by bisection.

    ``f(lo)`` and ``f(hi)`` must not share a strict sign. Returns an endpoint
    when ``f`` vanishes there.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise ValueError("root is not bracketed")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol or mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_decreasing(f, target, lo, hi, iters: int = 64):
    """Vectorised solve of ``f(x) = target`` for ``f`` decreasing on ``[lo, hi]``.

    ``target``, ``lo`` and ``hi`` broadcast; targets outside ``[f(hi), f(lo)]``
    converge to the nearer bound.
    """
    target = np.asarray(target, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = f(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)
