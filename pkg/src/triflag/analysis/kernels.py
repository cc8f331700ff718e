"""Per-sample Monte-Carlo kernels, written twice: a numba loop and a vectorized numpy path.

Both take the same raw variates, so for a fixed seed the two backends produce the
same samples and agree to rounding.

Sampling coordinates: with a = diag(e^s, e^t, e^{-s-t}) put P = t - s and
Q = -s - 2t, so that a^{-1} n(1,1,u) a = n(e^P, e^{P+Q}, u e^Q) and
ds dt = dP dQ / 3.
"""

from __future__ import annotations

import math

import numpy as np

from . import _accel
from ._accel import njit

__all__ = ["transform", "i_integrand", "iwasawa_parts", "rotations", "f_closed"]


# ---------------------------------------------------------------------------
# numba path

@njit(cache=True, nogil=True)
def _cauchy_logpdf(v, m, s):
    d = v - m
    return math.log(s / (math.pi * (s * s + d * d)))


@njit(cache=True, nogil=True)
def _logmix2(v1, v2):
    # equal mixture of unit Cauchys, given the offsets from both centres
    a = _cauchy_logpdf(v1, 0.0, 1.0)
    b = _cauchy_logpdf(v2, 0.0, 1.0)
    hi = max(a, b)
    return hi + math.log(0.5 * (math.exp(a - hi) + math.exp(b - hi)))


@njit(cache=True, nogil=True)
def _transform_nb(tp, tq, ux, uz, uy, cx, cz, cy, u, nu, mu_p, mu_q, sig_p, sig_q, t_const):
    n = tp.shape[0]
    out = np.empty((11, n))
    for i in range(n):
        p = mu_p + sig_p * tp[i]
        q = mu_q + sig_q * tq[i]
        alpha = math.exp(p)
        beta = math.exp(p + q)
        gamma = u * math.exp(q)
        eq = math.exp(q)
        # each mixture component draws its own offset exactly; the rest is derived
        tx = math.tan(math.pi * (ux[i] - 0.5))
        tz = math.tan(math.pi * (uz[i] - 0.5))
        if cx[i] == 0:
            x, xp = tx, tx + alpha
            edp = (1.0 - u) * beta - gamma * x
        else:
            x, xp = tx - alpha, tx
            edp = beta - gamma * xp
        if cz[i] == 0:
            z, zp = tz, tz + gamma
            zq = z + eq
        else:
            z, zp = tz - gamma, tz
            zq = zp + (1.0 - u) * eq
        # y' - y = beta + alpha z = alpha (z + e^Q); d' - d = edp
        eyp = alpha * zq
        xz = x * z
        sc0 = math.sqrt(1.0 + x * x)
        sc1 = math.sqrt(1.0 + z * z)
        sc2 = math.sqrt(1.0 + xp * xp)
        sc3 = math.sqrt(1.0 + zp * zp)
        ty = math.tan(math.pi * (uy[i] - 0.5))
        c = cy[i]
        if c == 0:
            y = sc0 * ty
            d = y - xz
        elif c == 1:
            d = sc1 * ty
            y = xz + d
        elif c == 2:
            y = sc2 * ty - eyp
            d = y - xz
        else:
            d = sc3 * ty - edp
            y = xz + d
        yp = sc2 * ty if c == 2 else y + eyp
        dp = sc3 * ty if c == 3 else d + edp
        # proposal density
        lp = t_const - 0.5 * (nu + 1.0) * math.log(1.0 + ((p - mu_p) / sig_p) ** 2 / nu) - math.log(sig_p)
        lq = t_const - 0.5 * (nu + 1.0) * math.log(1.0 + ((q - mu_q) / sig_q) ** 2 / nu) - math.log(sig_q)
        lx = _logmix2(x, xp)
        lz = _logmix2(z, zp)
        d0 = _cauchy_logpdf(y, 0.0, sc0)
        d1 = _cauchy_logpdf(d, 0.0, sc1)
        d2 = _cauchy_logpdf(yp, 0.0, sc2)
        d3 = _cauchy_logpdf(dp, 0.0, sc3)
        hi = max(max(d0, d1), max(d2, d3))
        ly = hi + math.log(
            0.25 * (math.exp(d0 - hi) + math.exp(d1 - hi) + math.exp(d2 - hi) + math.exp(d3 - hi))
        )
        s = (-2.0 * p - q) / 3.0
        t = (p - q) / 3.0
        out[0, i] = s
        out[1, i] = t
        out[2, i] = x
        out[3, i] = y
        out[4, i] = z
        out[5, i] = xp
        out[6, i] = yp
        out[7, i] = zp
        # measure ds dt dx dy dz = dP dQ dx dy dz / 3, over the proposal
        out[8, i] = -math.log(3.0) - (lp + lq + lx + lz + ly)
        out[9, i] = d
        out[10, i] = dp
    return out


@njit(cache=True, nogil=True)
def _f_nb(x, y, z, d):
    return 1.0 / math.sqrt((1.0 + z * z + d * d) * (1.0 + x * x + y * y))


@njit(cache=True, nogil=True)
def _i_integrand_nb(tr):
    n = tr.shape[1]
    out = np.empty(n)
    for i in range(n):
        s = tr[0, i]
        t = tr[1, i]
        f1 = _f_nb(tr[2, i], tr[3, i], tr[4, i], tr[9, i])
        f2 = _f_nb(tr[5, i], tr[6, i], tr[7, i], tr[10, i])
        out[i] = math.exp(tr[8, i] - 2.0 * s - t) * f1 * f2
    return out


@njit(cache=True, nogil=True)
def _gs(m, kap, idx, j):
    """Iwasawa of one 3x3 (rows m) by bottom-up modified Gram-Schmidt; returns (s, t)."""
    c = math.sqrt(m[2, 0] ** 2 + m[2, 1] ** 2 + m[2, 2] ** 2)
    for l in range(3):
        kap[idx, j, 2, l] = m[2, l] / c
    d = m[1, 0] * kap[idx, j, 2, 0] + m[1, 1] * kap[idx, j, 2, 1] + m[1, 2] * kap[idx, j, 2, 2]
    v0 = m[1, 0] - d * kap[idx, j, 2, 0]
    v1 = m[1, 1] - d * kap[idx, j, 2, 1]
    v2 = m[1, 2] - d * kap[idx, j, 2, 2]
    b = math.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
    kap[idx, j, 1, 0] = v0 / b
    kap[idx, j, 1, 1] = v1 / b
    kap[idx, j, 1, 2] = v2 / b
    w0 = m[0, 0]
    w1 = m[0, 1]
    w2 = m[0, 2]
    for r in (2, 1):
        d = w0 * kap[idx, j, r, 0] + w1 * kap[idx, j, r, 1] + w2 * kap[idx, j, r, 2]
        w0 -= d * kap[idx, j, r, 0]
        w1 -= d * kap[idx, j, r, 1]
        w2 -= d * kap[idx, j, r, 2]
    a = math.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
    kap[idx, j, 0, 0] = w0 / a
    kap[idx, j, 0, 1] = w1 / a
    kap[idx, j, 0, 2] = w2 / a
    return math.log(a), math.log(b)


@njit(cache=True, nogil=True)
def _kappa_w0n(x, y, z, d, kk):
    """K-part of w0 n(x,y,z) into kk; returns its A-coordinates.

    Rows come from cross products of (1, x, y) and (-d, -z, 1), so no entry
    needs a difference of large numbers.
    """
    r3 = math.sqrt(1.0 + x * x + y * y)
    cn = math.sqrt(1.0 + z * z + d * d)
    kk[2, 0] = 1.0 / r3
    kk[2, 1] = x / r3
    kk[2, 2] = y / r3
    h = r3 * cn
    kk[1, 0] = (x + y * z) / h
    kk[1, 1] = (-y * d - 1.0) / h
    kk[1, 2] = (x * d - z) / h
    kk[0, 0] = kk[1, 1] * kk[2, 2] - kk[1, 2] * kk[2, 1]
    kk[0, 1] = kk[1, 2] * kk[2, 0] - kk[1, 0] * kk[2, 2]
    kk[0, 2] = kk[1, 0] * kk[2, 1] - kk[1, 1] * kk[2, 0]
    return -math.log(cn), math.log(cn) - math.log(r3)


@njit(cache=True, nogil=True)
def _iwasawa_parts_nb(tr, ky):
    n = tr.shape[1]
    coords = np.empty((n, 3, 2))
    kap = np.empty((n, 3, 3, 3))
    m = np.empty((3, 3))
    kk = np.empty((3, 3))
    for i in range(n):
        s = tr[0, i]
        t = tr[1, i]
        for j in range(3):
            if j == 0:
                for r in range(3):
                    for l in range(3):
                        m[r, l] = ky[i, r, l]
                ds, dt = _gs(m, kap, i, j)
                coords[i, j, 0] = s + ds
                coords[i, j, 1] = t + dt
                continue
            if j == 1:
                s0, t0 = _kappa_w0n(tr[2, i], tr[3, i], tr[4, i], tr[9, i], kk)
            else:
                s0, t0 = _kappa_w0n(tr[5, i], tr[6, i], tr[7, i], tr[10, i], kk)
            for r in range(3):
                for l in range(3):
                    m[r, l] = kk[r, 0] * ky[i, 0, l] + kk[r, 1] * ky[i, 1, l] + kk[r, 2] * ky[i, 2, l]
            ds, dt = _gs(m, kap, i, j)
            # w0 a w0^-1 = diag(e^{-s-t}, e^t, e^s)
            coords[i, j, 0] = -s - t + s0 + ds
            coords[i, j, 1] = t + t0 + dt
    return coords, kap


@njit(cache=True, nogil=True)
def _rotations_nb(g):
    n = g.shape[0]
    out = np.empty((n, 3, 3))
    for i in range(n):
        w, x, y, z = g[i, 0], g[i, 1], g[i, 2], g[i, 3]
        r = math.sqrt(w * w + x * x + y * y + z * z)
        w /= r
        x /= r
        y /= r
        z /= r
        out[i, 0, 0] = 1 - 2 * (y * y + z * z)
        out[i, 0, 1] = 2 * (x * y - z * w)
        out[i, 0, 2] = 2 * (x * z + y * w)
        out[i, 1, 0] = 2 * (x * y + z * w)
        out[i, 1, 1] = 1 - 2 * (x * x + z * z)
        out[i, 1, 2] = 2 * (y * z - x * w)
        out[i, 2, 0] = 2 * (x * z - y * w)
        out[i, 2, 1] = 2 * (y * z + x * w)
        out[i, 2, 2] = 1 - 2 * (x * x + y * y)
    return out


# ---------------------------------------------------------------------------
# numpy path

def _cauchy_logpdf_np(v, m, s):
    d = v - m
    return np.log(s / (np.pi * (s * s + d * d)))


def _transform_np(tp, tq, ux, uz, uy, cx, cz, cy, u, nu, mu_p, mu_q, sig_p, sig_q, t_const):
    p = mu_p + sig_p * tp
    q = mu_q + sig_q * tq
    alpha = np.exp(p)
    beta = np.exp(p + q)
    gamma = u * np.exp(q)
    eq = np.exp(q)
    tx = np.tan(np.pi * (ux - 0.5))
    tz = np.tan(np.pi * (uz - 0.5))
    on_x = cx == 0
    x = np.where(on_x, tx, tx - alpha)
    xp = np.where(on_x, tx + alpha, tx)
    edp = np.where(on_x, (1.0 - u) * beta - gamma * x, beta - gamma * xp)
    on_z = cz == 0
    z = np.where(on_z, tz, tz - gamma)
    zp = np.where(on_z, tz + gamma, tz)
    eyp = alpha * np.where(on_z, z + eq, zp + (1.0 - u) * eq)
    xz = x * z
    scales = np.sqrt(1.0 + np.stack([x * x, z * z, xp * xp, zp * zp]))
    pick = np.asarray(cy, dtype=np.intp)
    draw = np.take_along_axis(scales, pick[None, :], 0)[0] * np.tan(np.pi * (uy - 0.5))
    y = np.select([pick == 0, pick == 2], [draw, draw - eyp], np.nan)
    d = np.select([pick == 1, pick == 3], [draw, draw - edp], y - xz)
    y = np.where(np.isnan(y), xz + d, y)
    yp = np.where(pick == 2, draw, y + eyp)
    dp = np.where(pick == 3, draw, d + edp)
    lp = t_const - 0.5 * (nu + 1.0) * np.log1p(((p - mu_p) / sig_p) ** 2 / nu) - np.log(sig_p)
    lq = t_const - 0.5 * (nu + 1.0) * np.log1p(((q - mu_q) / sig_q) ** 2 / nu) - np.log(sig_q)
    lx = np.logaddexp(_cauchy_logpdf_np(x, 0.0, 1.0), _cauchy_logpdf_np(xp, 0.0, 1.0)) + np.log(0.5)
    lz = np.logaddexp(_cauchy_logpdf_np(z, 0.0, 1.0), _cauchy_logpdf_np(zp, 0.0, 1.0)) + np.log(0.5)
    ly = np.logaddexp.reduce(_cauchy_logpdf_np(np.stack([y, d, yp, dp]), 0.0, scales), axis=0) + np.log(0.25)
    s = (-2.0 * p - q) / 3.0
    t = (p - q) / 3.0
    logw = -np.log(3.0) - (lp + lq + lx + lz + ly)
    return np.stack([s, t, x, y, z, xp, yp, zp, logw, d, dp])


def f_closed(x, y, z, d=None):
    """a(w0 n(x,y,z))^rho with the bracket simplified to 1 + z^2 + (y - xz)^2.

    Pass d = y - xz when it is known more accurately than the float difference.
    """
    if d is None:
        d = y - x * z
    return 1.0 / np.sqrt((1.0 + z * z + d * d) * (1.0 + x * x + y * y))


def _i_integrand_np(tr):
    return np.exp(tr[8] - 2.0 * tr[0] - tr[1]) * f_closed(tr[2], tr[3], tr[4], tr[9]) * f_closed(tr[5], tr[6], tr[7], tr[10])


def _gs_np(m):
    """Batched bottom-up modified Gram-Schmidt; m has shape (n, 3, 3)."""
    k = np.empty_like(m)
    c = np.linalg.norm(m[:, 2], axis=1)
    k[:, 2] = m[:, 2] / c[:, None]
    v = m[:, 1] - np.einsum("ni,ni->n", m[:, 1], k[:, 2])[:, None] * k[:, 2]
    b = np.linalg.norm(v, axis=1)
    k[:, 1] = v / b[:, None]
    w = m[:, 0].copy()
    for r in (2, 1):
        w = w - np.einsum("ni,ni->n", w, k[:, r])[:, None] * k[:, r]
    a = np.linalg.norm(w, axis=1)
    k[:, 0] = w / a[:, None]
    return np.log(a), np.log(b), k


def _kappa_w0n_np(x, y, z, d):
    r3 = np.sqrt(1.0 + x * x + y * y)
    cn = np.sqrt(1.0 + z * z + d * d)
    row3 = np.stack([np.ones_like(x), x, y], -1) / r3[:, None]
    row2 = np.stack([x + y * z, -y * d - 1.0, x * d - z], -1) / (r3 * cn)[:, None]
    row1 = np.cross(row2, row3)
    return -np.log(cn), np.log(cn) - np.log(r3), np.stack([row1, row2, row3], 1)


def _iwasawa_parts_np(tr, ky):
    n = tr.shape[1]
    coords = np.empty((n, 3, 2))
    kap = np.empty((n, 3, 3, 3))
    s, t = tr[0], tr[1]
    ds, dt, kap[:, 0] = _gs_np(ky)
    coords[:, 0, 0] = s + ds
    coords[:, 0, 1] = t + dt
    for j, rows in ((1, (2, 3, 4, 9)), (2, (5, 6, 7, 10))):
        s0, t0, kk = _kappa_w0n_np(*(tr[r] for r in rows))
        ds, dt, kap[:, j] = _gs_np(kk @ ky)
        coords[:, j, 0] = -s - t + s0 + ds
        coords[:, j, 1] = t + t0 + dt
    return coords, kap


def _rotations_np(g):
    q = g / np.linalg.norm(g, axis=1, keepdims=True)
    w, x, y, z = q.T
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], -1),
            np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], -1),
            np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], -1),
        ],
        1,
    )


# ---------------------------------------------------------------------------
# dispatch

def _pick(nb, np_):
    return nb if _accel.backend() == "numba" else np_


def transform(raw: dict, u: float, prop) -> np.ndarray:
    """Map raw variates to (s, t, x, y, z, x', y', z', log weight, y - xz, y' - x'z'), shape (11, n)."""
    fn = _pick(_transform_nb, _transform_np)
    return fn(
        raw["tp"], raw["tq"], raw["ux"], raw["uz"], raw["uy"], raw["cx"], raw["cz"], raw["cy"],
        float(u), prop.nu, prop.mu_p, prop.mu_q, prop.sig_p, prop.sig_q, prop.t_const,
    )


def i_integrand(tr: np.ndarray) -> np.ndarray:
    return _pick(_i_integrand_nb, _i_integrand_np)(tr)


def iwasawa_parts(tr: np.ndarray, ky: np.ndarray):
    """A-coordinates (n, 3, 2) and K-parts (n, 3, 3, 3) of g, w0 g and w0 n(1,1,u) g.

    ky holds k Y per sample, where g = a n k Y.
    """
    return _pick(_iwasawa_parts_nb, _iwasawa_parts_np)(tr, np.ascontiguousarray(ky))


def rotations(gauss: np.ndarray) -> np.ndarray:
    """Haar-distributed SO(3) elements from rows of four standard normals."""
    return _pick(_rotations_nb, _rotations_np)(np.ascontiguousarray(gauss))
