"""Adaptive Gauss-Kronrod quadrature and the overlap integral phi(r)."""

from __future__ import annotations

import heapq
import math

import numpy as np

__all__ = ["QuadratureError", "gk15", "adaptive_quad", "phi", "decay_table", "loglog_slope"]


class QuadratureError(ArithmeticError):
    pass


# 15-point Kronrod nodes on [-1, 1] and the embedded 7-point Gauss rule
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])


def gk15(f, a: float, b: float) -> tuple[float, float]:
    """Kronrod estimate on [a, b] and |Kronrod - Gauss| as error estimate."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = f(mid + half * _NODES)
    k = half * float(_WEIGHTS_K @ vals)
    g = half * float(_WEIGHTS_G @ vals)
    return k, abs(k - g)


def adaptive_quad(f, a: float, b: float, abs_tol: float = 1e-10, max_intervals: int = 5000,
                  breakpoints=()) -> tuple[float, float]:
    """Globally adaptive bisection on the interval with the largest error estimate.

    f must accept a numpy array. Raises QuadratureError if abs_tol is not reached
    within max_intervals subintervals.
    """
    if abs_tol <= 0:
        raise ValueError("abs_tol must be positive")
    edges = sorted({a, b, *[p for p in breakpoints if a < p < b]})
    heap = []
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = gk15(f, lo, hi)
        heapq.heappush(heap, (-e, lo, hi, v))
        total += v
        err += e
    while err > abs_tol:
        if len(heap) >= max_intervals:
            raise QuadratureError(
                f"error estimate {err:.3e} above tolerance {abs_tol:.1e} after {len(heap)} intervals"
            )
        neg_e, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = gk15(f, lo, mid)
        v2, e2 = gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total += v1 + v2 - v
        err += e1 + e2 + neg_e
    # re-sum to shed accumulated rounding from the running updates
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return total, err


def phi(r: float, abs_tol: float = 1e-10, max_intervals: int = 5000) -> float:
    """Integral over R of (1+x^2)^{-1/2} (1+(x+r)^2)^{-1/2}.

    The integrand is symmetric about x = -r/2, so phi = 2 * integral over x > -r/2.
    There x = sinh(v) absorbs the first factor, leaving 1/sqrt(1 + (sinh v + r)^2):
    smooth, of size 2/r at the left end and below 2 e^{-v} on the right, where
    the range stops at v = 45 (the tail is under 1e-19).
    """
    r = abs(float(r))

    def g(v):
        return 1.0 / np.sqrt(1.0 + (np.sinh(v) + r) ** 2)

    value, _ = adaptive_quad(
        g, -math.asinh(r / 2), 45.0, abs_tol=abs_tol / 2, max_intervals=max_intervals, breakpoints=(0.0,)
    )
    return 2.0 * value


def decay_table(radii=(10.0, 1e2, 1e3, 1e4), alpha: float = 0.9, abs_tol: float = 1e-8) -> list[dict]:
    rows = []
    for r in radii:
        p = phi(r, abs_tol=abs_tol)
        rows.append({"r": float(r), "phi": p, "scaled": r**alpha * p})
    return rows


def loglog_slope(radii, values) -> float:
    slope, _ = np.polyfit(np.log(radii), np.log(values), 1)
    return float(slope)
