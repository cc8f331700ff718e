"""Property suites behind ``triflag verify``.

Each check returns a ``Check`` whose detail holds only deterministic data
(counts, maxima, first failure), so reports are reproducible byte for byte.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from . import randexact
from .decomp import a_rho, bruhat_cell, bruhat_factor, iwasawa, normalize_det
from .exact import (
    WEYL,
    WEYL_NAMES,
    Diagonal,
    ExactMatrix,
    Unipotent,
    n_v_pattern,
    weyl,
    weyl_mul,
)
from .orbits import (
    CELLS,
    DIM_G,
    REFERENCE_CLASSES,
    REFERENCE_COUNTS,
    REFERENCE_DIMS,
    CanonicalRep,
    CellLabel,
    TriplePoint,
    canonicalize,
    closure_order,
    closure_witness,
    counts_table,
    dims_table,
    enumerate_cell,
    flip_check,
    orbit_class,
    orbit_of,
    stabilizer_witness_check,
)

__all__ = ["Check", "SCOPES", "DEFAULT_SAMPLES", "run", "run_check", "CHECK_NAMES", "FAMILY_SAMPLES", "cover_pairs"]

SCOPES = ("algebra", "orbits", "closure")

DEFAULT_SAMPLES = {
    "bruhat_roundtrip": 10_000,
    "iwasawa_roundtrip": 10_000,
    "f_xyz": 10_000,
    "canonical_moves": 1_000,
    "completeness": 1_000,
    "witness": 100,
    "g_invariance": 300,
    "flip": 3,
}

FAMILY_SAMPLES = (1, -1, 2, -2, 3)

# free coordinates of N_v = N ∩ v^-1 N v
_N_V_FREE = {"1": "xyz", "s1": "yz", "s2": "xy", "z1": "z", "z2": "x", "w0": ""}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        # numpy comparisons hand back np.bool_, which json refuses
        object.__setattr__(self, "passed", bool(self.passed))

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


# ---------------------------------------------------------------------------
# algebra


def _weyl_relations() -> Check:
    s1, s2 = WEYL["s1"].rep, WEYL["s2"].rep
    ok = {
        "z1=s2s1": (s2 @ s1) == WEYL["z1"].rep,
        "z2=s1s2": (s1 @ s2) == WEYL["z2"].rep,
        "w0=s1s2s1": (s1 @ s2 @ s1) == WEYL["w0"].rep,
        "table closed": all(weyl_mul(a, b).name in WEYL_NAMES for a in WEYL_NAMES for b in WEYL_NAMES),
    }
    return Check("weyl_relations", all(ok.values()), ok)


def _n_v_patterns() -> Check:
    got = {}
    for v in WEYL_NAMES:
        free = n_v_pattern(v).free()
        got[v] = "".join(c for c, f in zip("xyz", free) if f)
    return Check("n_v_patterns", got == _N_V_FREE, {"free": got})


def _bruhat_roundtrip(rng: random.Random, samples: int) -> Check:
    failure = None
    counts = dict.fromkeys(WEYL_NAMES, 0)
    for i in range(samples):
        w = WEYL[WEYL_NAMES[i % 6]]
        g = randexact.upper(rng) @ w.rep @ randexact.unipotent(rng).to_matrix()
        cell = bruhat_cell(g)
        p, w2, n = bruhat_factor(g)
        if cell.name != w.name or w2.name != w.name or p @ w2.rep @ n.to_matrix() != g or not p.is_upper_triangular():
            failure = {"index": i, "expected": w.name, "got": cell.name}
            break
        counts[w.name] += 1
    return Check("bruhat_roundtrip", failure is None, {"samples": samples, "per_cell": counts, "failure": failure})


def _random_sl3(gen: np.random.Generator) -> np.ndarray:
    g = gen.standard_normal((3, 3))
    if np.linalg.det(g) < 0:
        g[0] = -g[0]
    return normalize_det(g)


def _iwasawa_roundtrip(gen: np.random.Generator, samples: int) -> Check:
    worst = worst_rho = 0.0
    ortho = 0.0
    for _ in range(samples):
        g = _random_sl3(gen)
        dec = iwasawa(g)
        worst = max(worst, float(np.abs(dec.matrix() - g).max()))
        ortho = max(ortho, float(np.abs(dec.k @ dec.k.T - np.eye(3)).max()))
        ar = a_rho(g)
        worst_rho = max(worst_rho, abs(ar - dec.rho) / ar)
    ok = worst <= 1e-12 and worst_rho <= 1e-10 and ortho <= 1e-12
    return Check(
        "iwasawa_roundtrip",
        ok,
        {
            "samples": samples,
            "max_reconstruction_error": float(f"{worst:.3e}"),
            "max_orthogonality_error": float(f"{ortho:.3e}"),
            "max_a_rho_relative_error": float(f"{worst_rho:.3e}"),
            "tolerances": {"reconstruction": 1e-12, "a_rho": 1e-10},
        },
    )


def _f_xyz_vs_iwasawa(gen: np.random.Generator, samples: int) -> Check:
    from .analysis.functions import f_xyz

    w0 = WEYL["w0"].rep.to_float()
    pts = gen.uniform(-5, 5, (samples, 3))
    worst = 0.0
    for x, y, z in pts:
        n = np.array([[1, x, y], [0, 1, z], [0, 0, 1]])
        ref = iwasawa(w0 @ n).rho
        worst = max(worst, abs(float(f_xyz(x, y, z)) - ref) / ref)
    return Check("f_xyz_vs_iwasawa", worst <= 1e-10, {"samples": samples, "max_relative_error": float(f"{worst:.3e}")})


def _family_translate_matrix(gen: np.random.Generator, samples: int = 1000) -> Check:
    from .analysis.functions import family_translate

    worst = 0.0
    for _ in range(samples):
        u, s, t, x, y, z = gen.uniform(-2, 2, 6)
        a = np.diag([np.exp(s), np.exp(t), np.exp(-s - t)])
        nu = np.array([[1, 1, 1], [0, 1, u], [0, 0, 1]])
        n = np.array([[1, x, y], [0, 1, z], [0, 0, 1]])
        m = a @ nu @ np.linalg.inv(a) @ n
        got = family_translate(u, s, t, (x, y, z))
        ref = (m[0, 1], m[0, 2], m[1, 2])
        worst = max(worst, max(abs(g - r) / max(1.0, abs(r)) for g, r in zip(got, ref)))
    return Check("family_translate_matrix", worst <= 1e-12, {"samples": samples, "max_relative_error": float(f"{worst:.3e}")})


def algebra_suite(seed: int, samples: dict) -> list[Check]:
    rng = random.Random(seed)
    gen = np.random.default_rng(seed)
    return [
        _weyl_relations(),
        _n_v_patterns(),
        _bruhat_roundtrip(rng, samples["bruhat_roundtrip"]),
        _iwasawa_roundtrip(gen, samples["iwasawa_roundtrip"]),
        _f_xyz_vs_iwasawa(gen, samples["f_xyz"]),
        _family_translate_matrix(gen),
    ]


# ---------------------------------------------------------------------------
# orbits


def _tables() -> Check:
    counts = counts_table()
    dims = dims_table()
    bad_counts = [str(c) for c in CELLS if counts[c] != REFERENCE_COUNTS[c]]
    bad_dims = [str(c) for c in CELLS if dims[c] != REFERENCE_DIMS[c]]
    family = [str(c) for c in CELLS if any(o.rep.kind == "family" for o in enumerate_cell(c))]
    total = sum(counts.values())
    ok = not bad_counts and not bad_dims and total == 70 and family == ["(w0,w0)"]
    return Check(
        "tables",
        ok,
        {"total_isolated": total, "family_cells": family, "count_mismatches": bad_counts, "dim_mismatches": bad_dims},
    )


def _stabilizers(samples: int) -> Check:
    failures = []
    checked = 0
    classes = [o for c in CELLS for o in enumerate_cell(c) if o.rep.kind == "isolated"]
    classes += [orbit_class(CellLabel("w0", "w0"), CanonicalRep.family(u)) for u in FAMILY_SAMPLES]
    for o in classes:
        checked += 1
        if o.stab_dim != DIM_G - o.orbit_dim or o.stabilizer.dim != o.stab_dim:
            failures.append(f"{o.cell} {o.rep}: dim mismatch")
        if o.rep.kind == "family" and o.orbit_dim != 8:
            failures.append(f"{o.cell} {o.rep}: family orbit dim {o.orbit_dim}")
    witnessed = 0
    for cell, listed in REFERENCE_CLASSES.items():
        for pattern, dim, witness in listed:
            rep = CanonicalRep.family(1) if pattern == "family" else CanonicalRep.isolated(*pattern)
            o = orbit_class(cell, rep)
            if o.orbit_dim != dim:
                failures.append(f"{cell} {rep}: orbit dim {o.orbit_dim}, listed {dim}")
            if witness.params != o.stab_dim:
                failures.append(f"{cell} {rep}: witness {witness} has {witness.params} parameters, stabilizer dim {o.stab_dim}")
            res = stabilizer_witness_check(o, witness, samples=samples, seed=witnessed)
            witnessed += 1
            if not res.passed:
                failures.append(f"{cell} {rep}: {res.failure}")
    return Check(
        "stabilizers",
        not failures,
        {"classes": checked, "witnesses": witnessed, "samples_per_witness": samples, "failures": failures[:10]},
    )


def _random_move(rng: random.Random, cell: CellLabel, n: Unipotent) -> Unipotent:
    n_w = randexact.unipotent(rng, n_v_pattern(cell.w).free())
    n_v = randexact.unipotent(rng, n_v_pattern(cell.v).free())
    d = randexact.diagonal(rng)
    conj = Unipotent.from_matrix(d.to_matrix() @ n.to_matrix() @ d.to_matrix().inverse())
    return n_w * conj * n_v


def _canonical_soundness(rng: random.Random, moves: int) -> Check:
    failures = []
    reps = 0
    for cell in CELLS:
        targets = [o.rep for o in enumerate_cell(cell)]
        if cell == CellLabel("w0", "w0"):
            targets += [CanonicalRep.family(u) for u in FAMILY_SAMPLES]
        for rep in targets:
            reps += 1
            n = rep.unipotent()
            for _ in range(moves):
                got = canonicalize(cell, _random_move(rng, cell, n))
                if got != rep:
                    failures.append(f"{cell} {rep} -> {got}")
                    break
    return Check("canonical_soundness", not failures, {"representatives": reps, "moves_each": moves, "failures": failures})


def _canonical_completeness(rng: random.Random, samples: int) -> Check:
    failures = []
    for cell in CELLS:
        catalog = {o.rep for o in enumerate_cell(cell) if o.rep.kind == "isolated"}
        has_family = any(o.rep.kind == "family" for o in enumerate_cell(cell))
        for _ in range(samples):
            mask = tuple(rng.random() < 0.75 for _ in range(3))
            rep = canonicalize(cell, randexact.unipotent(rng, mask))
            if rep.kind == "family" and has_family:
                continue
            if rep not in catalog:
                failures.append(f"{cell}: {rep}")
                break
    return Check("canonical_completeness", not failures, {"per_cell": samples, "failures": failures})


def _g_invariance(rng: random.Random, samples: int) -> Check:
    failures = []
    for i in range(samples):
        cell = CELLS[i % len(CELLS)]
        classes = enumerate_cell(cell)
        o = classes[rng.randrange(len(classes))]
        x = TriplePoint.standard(cell.v, cell.w, o.rep.unipotent())
        got = orbit_of(x.translate(randexact.sl3(rng)))
        if (got.cell, got.rep) != (o.cell, o.rep):
            failures.append(f"{cell} {o.rep} -> {got.cell} {got.rep}")
    return Check("g_invariance", not failures, {"samples": samples, "failures": failures[:10]})


def _flip(seed: int, per_cell: int) -> Check:
    rep = flip_check(samples_per_cell=per_cell, seed=seed)
    return Check(
        "flip",
        rep.passed,
        {
            "counts_symmetric": rep.counts_symmetric,
            "dims_symmetric": rep.dims_symmetric,
            "sampled": rep.sampled,
            "failures": list(rep.failures[:10]),
        },
    )


def orbits_suite(seed: int, samples: dict) -> list[Check]:
    rng = random.Random(seed)
    return [
        _tables(),
        _stabilizers(samples["witness"]),
        _canonical_soundness(rng, samples["canonical_moves"]),
        _canonical_completeness(rng, samples["completeness"]),
        _g_invariance(rng, samples["g_invariance"]),
        _flip(seed, samples["flip"]),
    ]


# ---------------------------------------------------------------------------
# closure


def cover_pairs() -> list[tuple[CellLabel, CellLabel]]:
    """Covering relations of the closure order on the 36 cells."""
    out = []
    for small, big in itertools.product(CELLS, repeat=2):
        if small == big or not closure_order(small, big):
            continue
        between = any(
            mid not in (small, big) and closure_order(small, mid) and closure_order(mid, big) for mid in CELLS
        )
        if not between:
            out.append((small, big))
    return out


def closure_suite() -> list[Check]:
    edges = cover_pairs()
    missing = []
    for small, big in edges:
        if not closure_witness(small, big).passed:
            missing.append(f"{small} < {big}")
    dims_ok = all(
        sum(weyl(c.v).length + weyl(c.w).length for c in (b,)) == sum(weyl(c.v).length + weyl(c.w).length for c in (s,)) + 1
        for s, b in edges
    )
    return [
        Check("closure_edges", not missing, {"edges": len(edges), "unwitnessed": missing}),
        Check("closure_graded", dims_ok, {"edges": len(edges)}),
    ]


# ---------------------------------------------------------------------------


def run(scope: str = "all", seed: int = 0, samples: dict | None = None) -> list[Check]:
    eff = dict(DEFAULT_SAMPLES)
    eff.update(samples or {})
    scopes = SCOPES if scope == "all" else (scope,)
    out: list[Check] = []
    for s in scopes:
        if s == "algebra":
            out += algebra_suite(seed, eff)
        elif s == "orbits":
            out += orbits_suite(seed, eff)
        elif s == "closure":
            out += closure_suite()
        else:
            raise ValueError(f"unknown scope {s!r}; expected one of {SCOPES + ('all',)}")
    return out


def _single(name: str, seed: int, eff: dict) -> Check:
    rng = random.Random(seed)
    gen = np.random.default_rng(seed)
    table = {
        "weyl_relations": lambda: _weyl_relations(),
        "n_v_patterns": lambda: _n_v_patterns(),
        "bruhat_roundtrip": lambda: _bruhat_roundtrip(rng, eff["bruhat_roundtrip"]),
        "iwasawa_roundtrip": lambda: _iwasawa_roundtrip(gen, eff["iwasawa_roundtrip"]),
        "f_xyz_vs_iwasawa": lambda: _f_xyz_vs_iwasawa(gen, eff["f_xyz"]),
        "family_translate_matrix": lambda: _family_translate_matrix(gen),
        "tables": lambda: _tables(),
        "stabilizers": lambda: _stabilizers(eff["witness"]),
        "canonical_soundness": lambda: _canonical_soundness(rng, eff["canonical_moves"]),
        "canonical_completeness": lambda: _canonical_completeness(rng, eff["completeness"]),
        "g_invariance": lambda: _g_invariance(rng, eff["g_invariance"]),
        "flip": lambda: _flip(seed, eff["flip"]),
    }
    if name not in table:
        raise ValueError(f"unknown check {name!r}")
    return table[name]()


CHECK_NAMES = (
    "weyl_relations", "n_v_patterns", "bruhat_roundtrip", "iwasawa_roundtrip", "f_xyz_vs_iwasawa",
    "family_translate_matrix", "tables", "stabilizers", "canonical_soundness", "canonical_completeness",
    "g_invariance", "flip",
)


def run_check(name: str, seed: int = 0, samples: dict | None = None) -> Check:
    """One named check on its own random stream (suites share one stream, so values differ)."""
    eff = dict(DEFAULT_SAMPLES)
    eff.update(samples or {})
    return _single(name, seed, eff)
