"""Bruhat cells and factorizations (exact) and the Iwasawa decomposition (floating)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import ExactMatrix, Unipotent, WeylElement, rank, weyl_from_perm

__all__ = [
    "corner_ranks",
    "bruhat_cell",
    "bruhat_factor",
    "IwasawaTriple",
    "GramBlock",
    "iwasawa",
    "gram_block",
    "a_rho",
    "normalize_det",
    "DET_TOL",
]

DET_TOL = 1e-9


# ---------------------------------------------------------------------------
# Bruhat

def corner_ranks(g: ExactMatrix) -> tuple[tuple[int, ...], ...]:
    """r[i][j] = rank of rows i..2, columns 0..j.

    Invariant under left multiplication by upper-triangular matrices (row
    operations pulling from lower rows) and right multiplication by
    upper-triangular matrices (column operations pulling from earlier columns).
    """
    rows = g.rows
    return tuple(
        tuple(rank([r[: j + 1] for r in rows[i:]]) for j in range(3)) for i in range(3)
    )


def bruhat_cell(g: ExactMatrix) -> WeylElement:
    """The w with g in PwP, read off from rank increments of the corner submatrices."""
    r = corner_ranks(g)

    def rk(i, j):
        if i > 2 or j < 0:
            return 0
        return r[i][j]

    perm = [None, None, None]
    for i in range(3):
        for j in range(3):
            if rk(i, j) - rk(i + 1, j) - rk(i, j - 1) + rk(i + 1, j - 1) == 1:
                perm[i] = j
    if None in perm:
        raise ValueError(f"singular matrix has no Bruhat cell: {g!r}")
    return weyl_from_perm(perm)


def bruhat_factor(g: ExactMatrix) -> tuple[ExactMatrix, WeylElement, Unipotent]:
    """Exact g = p w n with p upper-triangular and n in N.

    Works bottom-up: each row is cleared left of its pivot by adding multiples
    of already-reduced lower rows, taken in increasing pivot-column order, then
    scaled so its pivot matches the sign of the representative of w. Lower rows
    with a pivot to the right are never used. The result is a function of g;
    as a factorization, n is unique only modulo left multiplication by N_w.
    """
    w = bruhat_cell(g)
    perm = w.perm
    reduced: list[list[Fraction] | None] = [None, None, None]
    # q is upper triangular with q @ g == reduced
    q = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    for i in (2, 1, 0):
        row = list(g.rows[i])
        coeffs = [Fraction(0)] * 3
        coeffs[i] = Fraction(1)
        lower = sorted((perm[l], l) for l in range(i + 1, 3) if perm[l] < perm[i])
        for col, l in lower:
            if row[col] != 0:
                f = row[col] / reduced[l][col]
                row = [a - f * b for a, b in zip(row, reduced[l])]
                coeffs = [a - f * b for a, b in zip(coeffs, q[l])]
        piv = perm[i]
        if any(row[c] != 0 for c in range(piv)) or row[piv] == 0:
            raise AssertionError("elimination left a nonzero entry left of the pivot")
        scale = w.rep.rows[i][piv] / row[piv]
        reduced[i] = [scale * v for v in row]
        q[i] = [scale * v for v in coeffs]
    wn = ExactMatrix(reduced)
    n_mat = w.rep.transpose() @ wn  # w^-1 = w^T for signed permutations
    n = Unipotent.from_matrix(n_mat)
    p = ExactMatrix(q).inverse()
    if not p.is_upper_triangular() or p @ w.rep @ n_mat != g:
        raise AssertionError("Bruhat factorization failed to reconstruct input")
    return p, w, n


# ---------------------------------------------------------------------------
# Iwasawa

@dataclass(frozen=True)
class IwasawaTriple:
    """g = a n k with a = diag(e^s, e^t, e^{-s-t}), n unit upper, k in SO(3)."""

    a: np.ndarray  # diagonal entries
    n: np.ndarray  # 3x3 unit upper-triangular
    k: np.ndarray  # 3x3 special orthogonal

    @property
    def s(self) -> float:
        return float(np.log(self.a[0]))

    @property
    def t(self) -> float:
        return float(np.log(self.a[1]))

    @property
    def n_coords(self) -> tuple[float, float, float]:
        return float(self.n[0, 1]), float(self.n[0, 2]), float(self.n[1, 2])

    @property
    def rho(self) -> float:
        """a^rho = a_1 / a_3 = e^{2s+t}."""
        return float(self.a[0] / self.a[2])

    def matrix(self) -> np.ndarray:
        return (self.a[:, None] * self.n) @ self.k


@dataclass(frozen=True)
class GramBlock:
    """Lower-right 2x2 block (B H; H C) of g g^T."""

    B: float
    H: float
    C: float


def normalize_det(g) -> np.ndarray:
    """Rescale a real 3x3 matrix with positive determinant to determinant one."""
    g = np.asarray(g, dtype=float)
    det = np.linalg.det(g)
    if not det > 0:
        raise ValueError(f"cannot normalize matrix with determinant {det} to SL3")
    return g / np.cbrt(det)


def _check_det(g: np.ndarray) -> None:
    det = np.linalg.det(g)
    if not abs(det - 1.0) <= DET_TOL:
        raise ValueError(f"input must have determinant 1, got {det!r}")


def iwasawa(g) -> IwasawaTriple:
    """Iwasawa decomposition via a Householder RQ factorization."""
    g = np.asarray(g, dtype=float)
    if g.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    _check_det(g)
    # RQ from QR of the row-reversed transpose
    q, r = np.linalg.qr(g[::-1].T)
    upper = r.T[::-1, ::-1]
    k = q.T[::-1]
    signs = np.sign(np.diag(upper))
    upper = upper * signs  # scales columns
    k = signs[:, None] * k
    a = np.diag(upper).copy()
    n = upper / a[:, None]
    return IwasawaTriple(a=a, n=n, k=k)


def gram_block(g) -> GramBlock:
    g = np.asarray(g, dtype=float)
    S = g @ g.T
    return GramBlock(B=float(S[1, 1]), H=float(S[1, 2]), C=float(S[2, 2]))


def a_rho(g) -> float:
    """a(g)^rho = 1 / (sqrt(BC - H^2) sqrt(C)) from the Gram block of g g^T."""
    g = np.asarray(g, dtype=float)
    _check_det(g)
    blk = gram_block(g)
    return 1.0 / (np.sqrt(blk.B * blk.C - blk.H**2) * np.sqrt(blk.C))
