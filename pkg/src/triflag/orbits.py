"""G-orbits on the triple flag variety X = (P\\G)^3 for G = SL3(R).

A point (Pg1, Pg2, Pg3) is moved to (1, v, w n) and n is reduced modulo
left multiplication by N_w, right multiplication by N_v and D-conjugation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from . import randexact
from .decomp import bruhat_cell, bruhat_factor
from .exact import (
    WEYL,
    WEYL_NAMES,
    Diagonal,
    ExactMatrix,
    Unipotent,
    WeylElement,
    as_rational,
    diag_conj,
    format_rational,
    n_v_pattern,
    nullspace,
    weyl,
)

__all__ = [
    "DIM_G",
    "TriplePoint",
    "CellLabel",
    "CanonicalRep",
    "OrbitClass",
    "LieSubspace",
    "StabilizerWitness",
    "WitnessResult",
    "CELLS",
    "REFERENCE_COUNTS",
    "REFERENCE_DIMS",
    "REFERENCE_CLASSES",
    "cell_dim",
    "schubert_cell",
    "absorb",
    "canonicalize",
    "orbit_of",
    "stabilizer_algebra",
    "stabilizer_dim",
    "stabilizer_witness_check",
    "orbit_class",
    "enumerate_cell",
    "enumerate_orbits",
    "counts_table",
    "dims_table",
    "bruhat_leq",
    "closure_order",
    "closure_witness",
    "ClosureWitness",
    "FlipReport",
    "flip",
    "flip_check",
]

DIM_G = 8


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class TriplePoint:
    g1: ExactMatrix
    g2: ExactMatrix
    g3: ExactMatrix

    def __post_init__(self):
        for name in ("g1", "g2", "g3"):
            det = getattr(self, name).det()
            if det != 1:
                raise ValueError(f"{name} has determinant {det}, expected 1")

    @classmethod
    def standard(cls, v, w, n: Unipotent | None = None) -> "TriplePoint":
        """The point (1, v, w n)."""
        n = n or Unipotent()
        return cls(ExactMatrix.identity(), weyl(v).rep, weyl(w).rep @ n.to_matrix())

    def translate(self, g: ExactMatrix) -> "TriplePoint":
        return TriplePoint(self.g1 @ g, self.g2 @ g, self.g3 @ g)


@dataclass(frozen=True, order=True)
class CellLabel:
    v: str
    w: str

    def __post_init__(self):
        object.__setattr__(self, "v", weyl(self.v).name)
        object.__setattr__(self, "w", weyl(self.w).name)

    def __str__(self) -> str:
        return f"({self.v},{self.w})"

    def flipped(self) -> "CellLabel":
        return CellLabel(self.w, self.v)


CELLS: tuple[CellLabel, ...] = tuple(CellLabel(v, w) for v in WEYL_NAMES for w in WEYL_NAMES)


@dataclass(frozen=True)
class CanonicalRep:
    """Isolated 0/1 pattern, or the family n(1,1,u) (cell (w0,w0) only)."""

    kind: str  # "isolated" | "family"
    pattern: tuple[int, int, int] = (0, 0, 0)
    u: Fraction | None = None

    def __post_init__(self):
        if self.kind == "family":
            if self.u is None or self.u == 0:
                raise ValueError("family parameter must be nonzero")
            object.__setattr__(self, "pattern", (1, 1, 1))
        elif self.kind != "isolated":
            raise ValueError(f"unknown kind {self.kind!r}")

    @classmethod
    def isolated(cls, *pattern: int) -> "CanonicalRep":
        return cls("isolated", tuple(int(bool(e)) for e in pattern))

    @classmethod
    def family(cls, u) -> "CanonicalRep":
        return cls("family", (1, 1, 1), as_rational(u))

    def unipotent(self) -> Unipotent:
        if self.kind == "family":
            return Unipotent(1, 1, self.u)
        return Unipotent(*self.pattern)

    def __str__(self) -> str:
        if self.kind == "family":
            return f"n(1,1,{self.u})"
        return "n({},{},{})".format(*self.pattern)

    def to_json(self) -> dict:
        if self.kind == "family":
            return {"kind": "family", "u": {"exact": format_rational(self.u)}}
        return {"kind": "isolated", "pattern": {"exact": list(self.pattern)}}


@dataclass(frozen=True)
class LieSubspace:
    """Subspace of sl3 spanned by exact 3x3 matrices (flattened row-major)."""

    basis: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrices(self) -> list[ExactMatrix]:
        return [ExactMatrix((b[0:3], b[3:6], b[6:9])) for b in self.basis]

    def descriptor(self) -> dict:
        """Torus part (diagonal projections) and root-space positions in use."""
        diag_rank = _rank_of([[b[0], b[4], b[8]] for b in self.basis]) if self.basis else 0
        positions = sorted(
            {(i, j) for b in self.basis for i in range(3) for j in range(3) if i != j and b[3 * i + j] != 0}
        )
        if self.dim == 0:
            kind = "trivial"
        elif self.dim == diag_rank:
            kind = "full D" if diag_rank == 2 else "one-parameter diagonal"
        elif self.dim - diag_rank == 1:
            kind = "D times a unipotent line" if diag_rank == 2 else "one-parameter diagonal times a unipotent line"
        else:
            kind = "parabolic-type"
        return {
            "kind": kind,
            "dim": self.dim,
            "torus_dim": diag_rank,
            "unipotent_positions": [f"({i + 1},{j + 1})" for i, j in positions],
        }


def _rank_of(rows) -> int:
    from .exact import rank

    return rank(rows)


@dataclass(frozen=True)
class StabilizerWitness:
    """A reference stabilizer family: diagonal shape plus free off-diagonal slots.

    diag is one of "1", "D", "aa" = d(a,a,1/a^2), "a2" = d(a,1/a^2,a),
    "2a" = d(1/a^2,a,a); slots is a subset of "xyz".
    """

    diag: str
    slots: str = ""

    @property
    def params(self) -> int:
        return {"1": 0, "D": 2}.get(self.diag, 1) + len(self.slots)

    def sample(self, rng: random.Random) -> ExactMatrix:
        a = randexact.rational(rng, nonzero=True)
        b = randexact.rational(rng, nonzero=True)
        d = {
            "1": (1, 1, 1),
            "D": (a, b, 1 / (a * b)),
            "aa": (a, a, 1 / a**2),
            "a2": (a, 1 / a**2, a),
            "2a": (1 / a**2, a, a),
        }[self.diag]
        off = {s: (randexact.rational(rng) if s in self.slots else 0) for s in "xyz"}
        return ExactMatrix(((d[0], off["x"], off["y"]), (0, d[1], off["z"]), (0, 0, d[2])))

    def __str__(self) -> str:
        return self.diag + ("" if not self.slots else "+" + self.slots)


@dataclass(frozen=True)
class OrbitClass:
    cell: CellLabel
    rep: CanonicalRep
    orbit_dim: int
    stab_dim: int
    stabilizer: LieSubspace = field(compare=False, repr=False)

    @property
    def stab_descriptor(self) -> dict:
        return self.stabilizer.descriptor()

    def to_json(self) -> dict:
        return {
            "cell": [self.cell.v, self.cell.w],
            "rep": self.rep.to_json(),
            "orbit_dim": {"exact": self.orbit_dim},
            "stab_dim": {"exact": self.stab_dim},
            "stabilizer": self.stab_descriptor,
            "stabilizer_basis": [m.to_strings() for m in self.stabilizer.matrices()],
        }


# ---------------------------------------------------------------------------
# reference classification: per-cell counts, dimension multisets, and listed classes with
# their reference stabilizer families

_ORDER = WEYL_NAMES

REFERENCE_COUNTS: dict[CellLabel, int] = {}
for _v, _row in zip(_ORDER, [
    [1, 1, 1, 1, 1, 1],
    [1, 2, 1, 2, 1, 2],
    [1, 1, 2, 1, 2, 2],
    [1, 2, 1, 3, 2, 4],
    [1, 1, 2, 2, 3, 4],
    [1, 2, 2, 4, 4, 7],
]):
    for _w, _c in zip(_ORDER, _row):
        REFERENCE_COUNTS[CellLabel(_v, _w)] = _c

_D = {
    "3": [3], "4": [4], "5": [5], "6": [6],
    "45": [4, 5], "56": [5, 6], "67": [6, 7], "567": [5, 6, 7],
    "6778": [6, 7, 7, 8], "6777888": [6, 7, 7, 7, 8, 8, 8],
}
REFERENCE_DIMS: dict[CellLabel, list[int]] = {}
for _v, _row in zip(_ORDER, [
    ["3", "4", "4", "5", "5", "6"],
    ["4", "45", "5", "56", "6", "67"],
    ["4", "5", "45", "6", "56", "67"],
    ["5", "56", "6", "567", "67", "6778"],
    ["5", "6", "56", "67", "567", "6778"],
    ["6", "67", "67", "6778", "6778", "6777888"],
]):
    for _w, _key in zip(_ORDER, _row):
        REFERENCE_DIMS[CellLabel(_v, _w)] = _D[_key]

_W = StabilizerWitness
# (v, w): [(pattern or "family", orbit dim, witness)]
REFERENCE_CLASSES: dict[CellLabel, list[tuple]] = {
    CellLabel(*k): v
    for k, v in {
        ("w0", "w0"): [
            ("family", 8, _W("1")),
            ((0, 1, 1), 8, _W("1")),
            ((1, 0, 1), 8, _W("1")),
            ((1, 1, 0), 8, _W("1")),
            ((1, 0, 0), 7, _W("aa")),
            ((0, 1, 0), 7, _W("a2")),
            ((0, 0, 1), 7, _W("2a")),
            ((0, 0, 0), 6, _W("D")),
        ],
        ("w0", "z1"): [
            ((1, 1, 0), 8, _W("1")),
            ((1, 0, 0), 7, _W("aa")),
            ((0, 1, 0), 7, _W("a2")),
            ((0, 0, 0), 6, _W("D")),
        ],
        ("w0", "z2"): [
            ((0, 1, 1), 8, _W("1")),
            ((0, 0, 1), 7, _W("2a")),
            ((0, 1, 0), 7, _W("a2")),
            ((0, 0, 0), 6, _W("D")),
        ],
        ("w0", "s1"): [((1, 0, 0), 7, _W("aa")), ((0, 0, 0), 6, _W("D"))],
        ("w0", "s2"): [((0, 0, 1), 7, _W("2a")), ((0, 0, 0), 6, _W("D"))],
        ("w0", "1"): [((0, 0, 0), 6, _W("D"))],
        ("z1", "z1"): [
            ((1, 0, 0), 7, _W("aa")),
            ((0, 1, 0), 6, _W("a2", "z")),
            ((0, 0, 0), 5, _W("D", "z")),
        ],
        ("z1", "z2"): [((0, 1, 0), 7, _W("a2")), ((0, 0, 0), 6, _W("D"))],
        ("z1", "s1"): [((1, 0, 0), 6, _W("aa", "z")), ((0, 0, 0), 5, _W("D", "z"))],
        ("z1", "s2"): [((0, 0, 0), 6, _W("D"))],
        ("z1", "1"): [((0, 0, 0), 5, _W("D", "z"))],
        ("z2", "z2"): [
            ((0, 0, 1), 7, _W("2a")),
            ((0, 1, 0), 6, _W("a2", "x")),
            ((0, 0, 0), 5, _W("D", "x")),
        ],
        ("z2", "s1"): [((0, 0, 0), 6, _W("D"))],
        ("z2", "1"): [((0, 0, 0), 5, _W("D", "x"))],
        ("z2", "s2"): [((0, 0, 1), 6, _W("2a", "x")), ((0, 0, 0), 5, _W("D", "x"))],
        ("s1", "s1"): [((1, 0, 0), 5, _W("aa", "yz")), ((0, 0, 0), 4, _W("D", "yz"))],
        ("s1", "s2"): [((0, 0, 0), 5, _W("D", "y"))],
        ("s1", "1"): [((0, 0, 0), 4, _W("D", "yz"))],
        ("s2", "s2"): [((0, 0, 1), 5, _W("2a", "xy")), ((0, 0, 0), 4, _W("D", "xy"))],
        ("s2", "1"): [((0, 0, 0), 4, _W("D", "xy"))],
        ("1", "1"): [((0, 0, 0), 3, _W("D", "xyz"))],
    }.items()
}


def cell_dim(cell: CellLabel) -> int:
    return 3 + weyl(cell.v).length + weyl(cell.w).length


# ---------------------------------------------------------------------------
# classification

def schubert_cell(x: TriplePoint) -> CellLabel:
    inv = x.g1.inverse()
    return CellLabel(bruhat_cell(x.g2 @ inv).name, bruhat_cell(x.g3 @ inv).name)


def absorb(cell: CellLabel, n: Unipotent) -> tuple[Unipotent, Unipotent]:
    """Moves (n_w, n_v) in N_w x N_v that bring n_w n n_v to reduced form.

    The double coset N_w n N_v is reduced before D-normalization. When y is
    free on either side it is central and absorbs completely, and then any
    free x or z is killed as well. Otherwise each side is N_{z1}, N_{z2} or
    trivial and the cases are handled one by one.
    """
    left = n_v_pattern(cell.w).free()
    right = n_v_pattern(cell.v).free()
    x, y, z = n.coords()
    zero = Fraction(0)
    if left[1] or right[1]:
        # left moves first (they may disturb y), then right moves, then y
        lx = -x if left[0] else zero
        lz = -z if left[2] else zero
        m = Unipotent(lx, 0, lz) * n
        rx = -m.x if (right[0] and not left[0]) else zero
        rz = -m.z if (right[2] and not left[2]) else zero
        m = m * Unipotent(rx, 0, rz)
        if left[1]:
            return Unipotent(lx, -m.y, lz), Unipotent(rx, 0, rz)
        return Unipotent(lx, 0, lz), Unipotent(rx, -m.y, rz)

    lx = lz = rx = rz = zero
    if left[2] and right[2]:  # (z1, z1)
        if x != 0:
            rz = -y / x
        lz = -z - rz
    elif left[0] and right[0]:  # (z2, z2)
        if z != 0:
            lx = -y / z
        rx = -x - lx
    else:
        if left[2]:  # w = z1
            lz = -z
        if right[0]:  # v = z2
            rx = -x
        if left[0]:  # w = z2
            lx = -x
        if right[2]:  # v = z1
            rz = -z
    return Unipotent(lx, 0, lz), Unipotent(rx, 0, rz)


def _reduce(cell: CellLabel, n: Unipotent) -> Unipotent:
    n_w, n_v = absorb(cell, n)
    return n_w * n * n_v


def canonicalize(cell: CellLabel, n: Unipotent) -> CanonicalRep:
    m = _reduce(cell, n)
    x, y, z = m.coords()
    if cell.v == "w0" and cell.w == "w0" and x != 0 and y != 0 and z != 0:
        # D-conjugation brings n to n(1, 1, xz/y); u is that last coordinate
        return CanonicalRep.family(x * z / y)
    return CanonicalRep.isolated(x != 0, y != 0, z != 0)


def orbit_of(x: TriplePoint) -> OrbitClass:
    """Move x to (1, v, w n3) and classify n3."""
    inv1 = x.g1.inverse()
    h2 = x.g2 @ inv1
    h3 = x.g3 @ inv1
    _, v, n2 = bruhat_factor(h2)
    # right translation by n2^-1 keeps the first coordinate at P
    h3 = h3 @ n2.inverse().to_matrix()
    _, w, n3 = bruhat_factor(h3)
    cell = CellLabel(v.name, w.name)
    return orbit_class(cell, canonicalize(cell, n3))


# ---------------------------------------------------------------------------
# stabilizers

def _lower_entries_of_conj(h: ExactMatrix) -> list[list[Fraction]]:
    """Rows expressing the strictly-lower entries of h X h^-1 as linear forms in X."""
    hinv = h.inverse()
    eqs = []
    for i, j in ((1, 0), (2, 0), (2, 1)):
        # (h X h^-1)_{ij} = sum_{k,l} h_ik X_kl hinv_lj
        eqs.append([h[i, k] * hinv[l, j] for k in range(3) for l in range(3)])
    return eqs


def stabilizer_algebra(cell: CellLabel, n: Unipotent) -> LieSubspace:
    """p ∩ Ad(v^-1) p ∩ Ad((wn)^-1) p inside sl3."""
    v = weyl(cell.v).rep
    wn = weyl(cell.w).rep @ n.to_matrix()
    eqs = [[Fraction(int(k == 3 * i + j)) for k in range(9)] for i, j in ((1, 0), (2, 0), (2, 1))]
    eqs += _lower_entries_of_conj(v)
    eqs += _lower_entries_of_conj(wn)
    eqs.append([Fraction(int(k in (0, 4, 8))) for k in range(9)])
    basis = nullspace(eqs, 9)
    return LieSubspace(tuple(tuple(b) for b in basis))


def stabilizer_dim(cell: CellLabel, n: Unipotent) -> int:
    return stabilizer_algebra(cell, n).dim


def orbit_class(cell: CellLabel, rep: CanonicalRep) -> OrbitClass:
    stab = stabilizer_algebra(cell, rep.unipotent())
    return OrbitClass(cell, rep, DIM_G - stab.dim, stab.dim, stab)


@dataclass(frozen=True)
class WitnessResult:
    passed: bool
    samples: int
    failure: str | None = None


def stabilizer_witness_check(
    cls: OrbitClass, witness: StabilizerWitness, samples: int = 100, seed: int = 0
) -> WitnessResult:
    """Sample a reference stabilizer family and test the three membership conditions."""
    rng = random.Random(seed)
    v = weyl(cls.cell.v).rep
    wn = weyl(cls.cell.w).rep @ cls.rep.unipotent().to_matrix()
    vinv, wninv = v.inverse(), wn.inverse()
    for i in range(samples):
        s = witness.sample(rng)
        if s.det() != 1:
            return WitnessResult(False, i, f"witness sample {s!r} has det {s.det()}")
        if not s.is_upper_triangular():
            return WitnessResult(False, i, f"s not in P: {s!r}")
        if not (v @ s @ vinv).is_upper_triangular():
            return WitnessResult(False, i, f"v s v^-1 not in P for s = {s!r}")
        if not (wn @ s @ wninv).is_upper_triangular():
            return WitnessResult(False, i, f"(wn) s (wn)^-1 not in P for s = {s!r}")
    return WitnessResult(True, samples)


# ---------------------------------------------------------------------------
# enumeration and tables

@lru_cache(maxsize=None)
def enumerate_cell(cell: CellLabel) -> tuple[OrbitClass, ...]:
    """All classes in a cell; every class has a 0/1 representative (u = 1 for the family)."""
    seen: dict[CanonicalRep, None] = {}
    for eps in itertools.product((0, 1), repeat=3):
        rep = canonicalize(cell, Unipotent(*eps))
        if rep.kind == "family":
            rep = CanonicalRep("family", u=Fraction(1))
        seen.setdefault(rep, None)
    reps = sorted(seen, key=lambda r: (r.kind == "family", r.pattern))
    return tuple(orbit_class(cell, r) for r in reps)


def enumerate_orbits(cells: Iterable[CellLabel] = CELLS) -> dict[CellLabel, tuple[OrbitClass, ...]]:
    return {c: enumerate_cell(c) for c in cells}


def counts_table() -> dict[CellLabel, int]:
    """Isolated orbit counts per cell (the family is excluded)."""
    return {c: sum(1 for o in enumerate_cell(c) if o.rep.kind == "isolated") for c in CELLS}


def dims_table() -> dict[CellLabel, list[int]]:
    """Sorted isolated orbit dimensions per cell."""
    return {
        c: sorted(o.orbit_dim for o in enumerate_cell(c) if o.rep.kind == "isolated") for c in CELLS
    }


# ---------------------------------------------------------------------------
# closure order

_BRUHAT_COVERS = {
    ("1", "s1"), ("1", "s2"),
    ("s1", "z1"), ("s2", "z2"),
    ("s1", "z2"), ("s2", "z1"),
    ("z1", "w0"), ("z2", "w0"),
}


@lru_cache(maxsize=None)
def _bruhat_leq_table() -> frozenset:
    rel = {(a, a) for a in WEYL_NAMES} | set(_BRUHAT_COVERS)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return frozenset(rel)


def bruhat_leq(u, v) -> bool:
    return (weyl(u).name, weyl(v).name) in _bruhat_leq_table()


def closure_order(small: CellLabel, big: CellLabel) -> bool:
    """S_small ⊂ closure(S_big): product of the Bruhat order with itself."""
    return bruhat_leq(small.v, big.v) and bruhat_leq(small.w, big.w)


_ROOTS = [(i, j) for i in range(3) for j in range(3) if i != j]
_EPSILONS = [Fraction(1, 2**k) for k in range(1, 6)]


def _elementary(i: int, j: int, eps: Fraction) -> ExactMatrix:
    rows = [[Fraction(int(r == c)) for c in range(3)] for r in range(3)]
    rows[i][j] = eps
    return ExactMatrix(rows)


def _templates(max_len: int = 3):
    for length in range(1, max_len + 1):
        yield from itertools.product(_ROOTS, repeat=length)


def _witness_curve(small, big, trials: int):
    """A root-subgroup word t with cell(small_rep * prod(I + eps E)) = big for all sampled eps."""
    if small == big:
        return ()
    rep = weyl(small).rep
    for k, word in enumerate(_templates()):
        if k >= trials:
            break
        ok = True
        for eps in _EPSILONS:
            g = rep
            for i, j in word:
                g = g @ _elementary(i, j, eps)
            if bruhat_cell(g).name != big:
                ok = False
                break
        if ok:
            return word
    return None


@dataclass(frozen=True)
class ClosureWitness:
    passed: bool
    second: tuple | None
    third: tuple | None

    def describe(self) -> str:
        def fmt(word):
            if word is None:
                return "none"
            if not word:
                return "constant"
            return "*".join(f"(I+eps E{i + 1}{j + 1})" for i, j in word)

        return f"second: {fmt(self.second)}; third: {fmt(self.third)}"


def closure_witness(small: CellLabel, big: CellLabel, trials: int = 258) -> ClosureWitness:
    """Curve x(eps) = (1, v_s u(eps), w_s u'(eps)) lying in S_big for eps != 0 and in S_small at 0.

    The cell of (1, g2, g3) is (cell(g2), cell(g3)), so the two coordinates are
    searched independently over words in the root subgroups.
    """
    second = _witness_curve(small.v, big.v, trials)
    third = _witness_curve(small.w, big.w, trials)
    return ClosureWitness(second is not None and third is not None, second, third)


# ---------------------------------------------------------------------------
# flip

def flip(x: TriplePoint) -> TriplePoint:
    return TriplePoint(x.g1, x.g3, x.g2)


@dataclass(frozen=True)
class FlipReport:
    passed: bool
    counts_symmetric: bool
    dims_symmetric: bool
    sampled: int
    failures: tuple[str, ...] = ()


def flip_check(samples_per_cell: int = 3, seed: int = 0) -> FlipReport:
    counts = counts_table()
    dims = dims_table()
    counts_sym = all(counts[c] == counts[c.flipped()] for c in CELLS)
    dims_sym = all(dims[c] == dims[c.flipped()] for c in CELLS)
    rng = random.Random(seed)
    failures = []
    sampled = 0
    for cell in CELLS:
        for o in enumerate_cell(cell):
            for _ in range(samples_per_cell):
                x = TriplePoint.standard(cell.v, cell.w, o.rep.unipotent()).translate(randexact.sl3(rng))
                fx = orbit_of(flip(x))
                sampled += 1
                if fx.cell != cell.flipped() or fx.orbit_dim != o.orbit_dim:
                    failures.append(f"{cell} {o.rep}: flip gave {fx.cell} dim {fx.orbit_dim}")
    return FlipReport(
        counts_sym and dims_sym and not failures, counts_sym, dims_sym, sampled, tuple(failures)
    )
