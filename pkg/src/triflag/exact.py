"""Exact rational 3x3 linear algebra, the coordinate groups N and D, and the Weyl group.

All entries are :class:`fractions.Fraction`; nothing here touches floating point,
so cell membership and ranks are decisions rather than tolerance checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "Fraction",
    "as_rational",
    "format_rational",
    "ExactMatrix",
    "Unipotent",
    "Diagonal",
    "WeylElement",
    "SubgroupPattern",
    "WEYL",
    "WEYL_NAMES",
    "weyl",
    "weyl_from_perm",
    "weyl_mul",
    "weyl_table",
    "unip_mul",
    "unip_inv",
    "diag_conj",
    "n_v_pattern",
    "conj_parabolic_pattern",
    "upper_mask",
    "unipotent_mask",
    "rank",
    "nullspace",
]


def as_rational(value) -> Fraction:
    """Coerce ints, ``"p/q"`` strings and Fractions. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational: {value!r}")


def format_rational(q: Fraction) -> str:
    """Always "p/q" in lowest terms, integers included ("3/1")."""
    q = as_rational(q)
    return f"{q.numerator}/{q.denominator}"


class ExactMatrix:
    """Immutable 3x3 matrix of Fractions."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(as_rational(v) for v in r) for r in rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("ExactMatrix must be 3x3")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    @classmethod
    def identity(cls) -> "ExactMatrix":
        return _IDENTITY

    @classmethod
    def diag(cls, a, b, c) -> "ExactMatrix":
        return cls(((a, 0, 0), (0, b, 0), (0, 0, c)))

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]]) -> "ExactMatrix":
        return cls(rows)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(v) for v in r) for r in self.rows)
        return f"ExactMatrix[{body}]"

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        a = self.rows
        b = other.rows
        return ExactMatrix(
            tuple(
                tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j] for j in range(3))
                for i in range(3)
            )
        )

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(tuple(tuple(-v for v in r) for r in self.rows))

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(tuple(zip(*self.rows)))

    def det(self) -> Fraction:
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def inverse(self) -> "ExactMatrix":
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        det = self.det()
        if det == 0:
            raise ZeroDivisionError("singular matrix")
        adj = (
            (e * i - f * h, c * h - b * i, b * f - c * e),
            (f * g - d * i, a * i - c * g, c * d - a * f),
            (d * h - e * g, b * g - a * h, a * e - b * d),
        )
        return ExactMatrix(tuple(tuple(v / det for v in r) for r in adj))

    def is_upper_triangular(self) -> bool:
        r = self.rows
        return r[1][0] == 0 and r[2][0] == 0 and r[2][1] == 0

    def in_pattern(self, pattern: "SubgroupPattern") -> bool:
        return all(
            self.rows[i][j] == 0 for i in range(3) for j in range(3) if pattern.cells[i][j] == "0"
        )

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(v) for v in r] for r in self.rows]

    def to_float(self):
        import numpy as np

        return np.array([[float(v) for v in r] for r in self.rows])


_IDENTITY = ExactMatrix(((1, 0, 0), (0, 1, 0), (0, 0, 1)))


@dataclass(frozen=True)
class Unipotent:
    """n(x, y, z): unit upper-triangular with (1,2)=x, (1,3)=y, (2,3)=z."""

    x: Fraction = Fraction(0)
    y: Fraction = Fraction(0)
    z: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))

    def to_matrix(self) -> ExactMatrix:
        return ExactMatrix(((1, self.x, self.y), (0, 1, self.z), (0, 0, 1)))

    @classmethod
    def from_matrix(cls, m: ExactMatrix) -> "Unipotent":
        r = m.rows
        if not (m.is_upper_triangular() and r[0][0] == r[1][1] == r[2][2] == 1):
            raise ValueError(f"not unit upper-triangular: {m!r}")
        return cls(r[0][1], r[0][2], r[1][2])

    def __mul__(self, other: "Unipotent") -> "Unipotent":
        return unip_mul(self, other)

    def inverse(self) -> "Unipotent":
        return unip_inv(self)

    def coords(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.x, self.y, self.z)

    def __repr__(self) -> str:
        return f"n({self.x}, {self.y}, {self.z})"


@dataclass(frozen=True)
class Diagonal:
    """d(a, b, c) with abc = 1; entries may be negative since D = AM."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.a == 0 or self.b == 0 or self.c == 0:
            raise ValueError("diagonal entries must be nonzero")
        if self.a * self.b * self.c != 1:
            raise ValueError(f"d({self.a}, {self.b}, {self.c}) does not have determinant 1")

    @classmethod
    def from_ab(cls, a, b) -> "Diagonal":
        a, b = as_rational(a), as_rational(b)
        return cls(a, b, 1 / (a * b))

    def to_matrix(self) -> ExactMatrix:
        return ExactMatrix.diag(self.a, self.b, self.c)

    def inverse(self) -> "Diagonal":
        return Diagonal(1 / self.a, 1 / self.b, 1 / self.c)


def unip_mul(n1: Unipotent, n2: Unipotent) -> Unipotent:
    return Unipotent(n1.x + n2.x, n1.y + n2.y + n1.x * n2.z, n1.z + n2.z)


def unip_inv(n: Unipotent) -> Unipotent:
    return Unipotent(-n.x, n.x * n.z - n.y, -n.z)


def diag_conj(d: Diagonal, n: Unipotent) -> Unipotent:
    """Coordinates of d n d^-1."""
    return Unipotent(n.x * d.a / d.b, n.y * d.a / d.c, n.z * d.b / d.c)


# ---------------------------------------------------------------------------
# subgroup patterns

_POS = {"x": (0, 1), "y": (0, 2), "z": (1, 2)}


@dataclass(frozen=True)
class SubgroupPattern:
    """A 3x3 shape over {'0': forced zero, '*': free, 'd': diagonal}."""

    cells: tuple[tuple[str, str, str], ...]

    def __str__(self) -> str:
        return "\n".join(" ".join(r) for r in self.cells)

    def __and__(self, other: "SubgroupPattern") -> "SubgroupPattern":
        def meet(a, b):
            if a == "0" or b == "0":
                return "0"
            if a == "d" or b == "d":
                return "d"
            return "*"

        return SubgroupPattern(
            tuple(tuple(meet(self.cells[i][j], other.cells[i][j]) for j in range(3)) for i in range(3))
        )

    def free(self) -> tuple[bool, bool, bool]:
        """Which unipotent coordinates (x, y, z) the shape leaves free."""
        return tuple(self.cells[i][j] != "0" for (i, j) in _POS.values())

    def as_lists(self) -> list[list[str]]:
        return [list(r) for r in self.cells]


def upper_mask() -> SubgroupPattern:
    return SubgroupPattern(((("*",) * 3), ("0", "*", "*"), ("0", "0", "*")))


def unipotent_mask() -> SubgroupPattern:
    return SubgroupPattern((("d", "*", "*"), ("0", "d", "*"), ("0", "0", "d")))


# ---------------------------------------------------------------------------
# Weyl group

@dataclass(frozen=True)
class WeylElement:
    name: str
    rep: ExactMatrix
    length: int

    @property
    def perm(self) -> tuple[int, int, int]:
        """Column of the nonzero entry in each row."""
        return _perm_of(self.rep)

    def __repr__(self) -> str:
        return self.name

    def __str__(self) -> str:
        return self.name


def _perm_of(m: ExactMatrix) -> tuple[int, int, int]:
    out = []
    for row in m.rows:
        nz = [j for j, v in enumerate(row) if v != 0]
        if len(nz) != 1:
            raise ValueError(f"not a monomial matrix: {m!r}")
        out.append(nz[0])
    return tuple(out)


WEYL_NAMES = ("1", "s1", "s2", "z1", "z2", "w0")

# signed permutation representatives, stored verbatim
_REPS = {
    "1": ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    "s1": ((0, 1, 0), (1, 0, 0), (0, 0, -1)),
    "s2": ((-1, 0, 0), (0, 0, 1), (0, 1, 0)),
    "z1": ((0, -1, 0), (0, 0, -1), (1, 0, 0)),
    "z2": ((0, 0, 1), (-1, 0, 0), (0, -1, 0)),
    "w0": ((0, 0, -1), (0, -1, 0), (-1, 0, 0)),
}
_LENGTHS = {"1": 0, "s1": 1, "s2": 1, "z1": 2, "z2": 2, "w0": 3}

WEYL: dict[str, WeylElement] = {
    name: WeylElement(name, ExactMatrix(_REPS[name]), _LENGTHS[name]) for name in WEYL_NAMES
}
_BY_PERM = {w.perm: w for w in WEYL.values()}

_ALIASES = {"e": "1", "id": "1", "s₁": "s1", "s₂": "s2", "z₁": "z1", "z₂": "z2", "w₀": "w0"}


def weyl(name: str | WeylElement) -> WeylElement:
    if isinstance(name, WeylElement):
        return name
    key = _ALIASES.get(name, name)
    try:
        return WEYL[key]
    except KeyError:
        raise ValueError(f"unknown Weyl element {name!r}; expected one of {WEYL_NAMES}") from None


def weyl_from_perm(perm: Sequence[int]) -> WeylElement:
    return _BY_PERM[tuple(perm)]


def weyl_mul(u: WeylElement | str, v: WeylElement | str) -> WeylElement:
    """Product in W, computed from the representatives modulo D."""
    return weyl_from_perm(_perm_of(weyl(u).rep @ weyl(v).rep))


@lru_cache(maxsize=None)
def weyl_table() -> dict[tuple[str, str], str]:
    return {(a, b): weyl_mul(a, b).name for a in WEYL_NAMES for b in WEYL_NAMES}


@lru_cache(maxsize=None)
def conj_parabolic_pattern(v: WeylElement | str) -> SubgroupPattern:
    """Shape of v^-1 P v: entry (i,j) survives iff perm^-1(i) <= perm^-1(j)."""
    perm = weyl(v).perm
    inv = [0, 0, 0]
    for k, j in enumerate(perm):
        inv[j] = k
    cells = tuple(
        tuple("d" if i == j else ("*" if inv[i] <= inv[j] else "0") for j in range(3))
        for i in range(3)
    )
    return SubgroupPattern(cells)


@lru_cache(maxsize=None)
def n_v_pattern(v: WeylElement | str) -> SubgroupPattern:
    """Shape of N_v = N ∩ v^-1 N v."""
    return unipotent_mask() & conj_parabolic_pattern(v)


# ---------------------------------------------------------------------------
# exact linear algebra over Q (row reduction)

def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    m = [list(r) for r in rows]
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    rows = [[as_rational(v) for v in r] for r in rows]
    return len(_rref(rows)[1])


def nullspace(rows: Sequence[Sequence], n_cols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : rows @ v = 0}, one vector per free column."""
    rows = [[as_rational(v) for v in r] for r in rows]
    if n_cols is None:
        n_cols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    m, pivots = _rref(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -m[r][f]
        basis.append(v)
    return basis
