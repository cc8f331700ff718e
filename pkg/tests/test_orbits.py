import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from triflag import randexact
from triflag.exact import WEYL_NAMES, Diagonal, ExactMatrix, Unipotent, diag_conj, n_v_pattern, weyl
from triflag.orbits import (
    CELLS,
    DIM_G,
    REFERENCE_CLASSES,
    REFERENCE_COUNTS,
    REFERENCE_DIMS,
    CanonicalRep,
    CellLabel,
    TriplePoint,
    bruhat_leq,
    canonicalize,
    cell_dim,
    closure_order,
    closure_witness,
    counts_table,
    dims_table,
    enumerate_cell,
    flip,
    flip_check,
    orbit_class,
    orbit_of,
    schubert_cell,
    stabilizer_dim,
    stabilizer_witness_check,
)

seeds = st.integers(0, 2**32 - 1)
cells = st.sampled_from(CELLS)


def test_counts_table():
    counts = counts_table()
    assert counts == REFERENCE_COUNTS
    rows = [sum(counts[CellLabel(v, w)] for w in WEYL_NAMES) for v in WEYL_NAMES]
    assert rows == [6, 9, 9, 13, 13, 20]
    assert sum(rows) == 70


def test_dims_table():
    dims = dims_table()
    assert dims == REFERENCE_DIMS
    assert dims[CellLabel("w0", "w0")] == [6, 7, 7, 7, 8, 8, 8]


def test_only_open_cell_has_family():
    for c in CELLS:
        fam = [o for o in enumerate_cell(c) if o.rep.kind == "family"]
        assert len(fam) == (1 if c == CellLabel("w0", "w0") else 0)


def test_tables_symmetric_under_flip():
    counts, dims = counts_table(), dims_table()
    for c in CELLS:
        assert counts[c] == counts[c.flipped()]
        assert dims[c] == dims[c.flipped()]


@pytest.mark.parametrize("cell", CELLS, ids=str)
def test_orbit_dims_bounded_by_cell(cell):
    # an orbit sits inside its cell and the open orbit of a cell fills it
    dims = [o.orbit_dim for o in enumerate_cell(cell)]
    assert max(dims) <= min(cell_dim(cell), DIM_G)
    assert max(dims) == min(cell_dim(cell), DIM_G)


@pytest.mark.parametrize("cell", sorted(REFERENCE_CLASSES), ids=str)
def test_reference_witnesses(cell):
    for pattern, dim, witness in REFERENCE_CLASSES[cell]:
        rep = CanonicalRep.family(1) if pattern == "family" else CanonicalRep.isolated(*pattern)
        cls = orbit_class(cell, rep)
        assert cls.orbit_dim == dim
        assert cls.stab_dim == DIM_G - dim
        assert witness.params == cls.stab_dim
        assert stabilizer_witness_check(cls, witness, samples=20, seed=1).passed


@pytest.mark.parametrize("u", [1, -1, 2, -2, 3, Fraction(1, 7)])
def test_family_is_open(u):
    cell = CellLabel("w0", "w0")
    assert stabilizer_dim(cell, Unipotent(1, 1, u)) == 0


@given(seeds, cells)
def test_canonicalize_invariant_under_moves(seed, cell):
    rng = random.Random(seed)
    n = randexact.unipotent(rng)
    rep = canonicalize(cell, n)
    nw = randexact.unipotent(rng, n_v_pattern(cell.w).free())
    nv = randexact.unipotent(rng, n_v_pattern(cell.v).free())
    d = randexact.diagonal(rng)
    moved = nw * diag_conj(d, n) * nv
    assert canonicalize(cell, moved) == rep


@given(seeds, cells)
def test_canonical_rep_is_fixed_point(seed, cell):
    rng = random.Random(seed)
    rep = canonicalize(cell, randexact.unipotent(rng))
    assert canonicalize(cell, rep.unipotent()) == rep


@given(seeds, cells)
def test_orbit_of_is_g_invariant(seed, cell):
    rng = random.Random(seed)
    n = randexact.unipotent(rng, size=4)
    x = TriplePoint.standard(cell.v, cell.w, n)
    base = orbit_of(x)
    assert base.cell == cell == schubert_cell(x)
    assert orbit_of(x.translate(randexact.sl3(rng))) == base


@given(seeds)
def test_flip_swaps_cell(seed):
    rng = random.Random(seed)
    cell = rng.choice(CELLS)
    x = TriplePoint.standard(cell.v, cell.w, randexact.unipotent(rng)).translate(randexact.sl3(rng))
    fx = orbit_of(flip(x))
    assert fx.cell == cell.flipped()
    assert fx.orbit_dim == orbit_of(x).orbit_dim


def test_flip_check():
    assert flip_check(samples_per_cell=1, seed=2).passed


def test_family_parameter_example():
    w0 = weyl("w0").rep
    x = TriplePoint(ExactMatrix.identity(), w0, w0 @ Unipotent(1, 1, 3).to_matrix())
    cls = orbit_of(x)
    assert cls.rep == CanonicalRep.family(3)


@given(st.integers(1, 20), st.integers(1, 20), st.integers(1, 20), st.integers(1, 9), st.integers(1, 9))
def test_family_parameter_is_d_invariant(x, y, z, a, b):
    cell = CellLabel("w0", "w0")
    n = Unipotent(x, y, z)
    d = Diagonal.from_ab(Fraction(a, b), Fraction(b, a + 1))
    rep = canonicalize(cell, diag_conj(d, n))
    assert rep.kind == "family" and rep.u == Fraction(x * z, y)


def test_family_distinct_u_distinct_orbits():
    cell = CellLabel("w0", "w0")
    reps = {canonicalize(cell, Unipotent(1, 1, u)) for u in (1, 2, -1, Fraction(1, 2))}
    assert len(reps) == 4


def test_triple_point_rejects_non_unimodular():
    with pytest.raises(ValueError, match="determinant"):
        TriplePoint(ExactMatrix.diag(2, 1, 1), ExactMatrix.identity(), ExactMatrix.identity())


def test_bruhat_order():
    assert bruhat_leq("1", "w0")
    assert bruhat_leq("s1", "z2") and bruhat_leq("s2", "z1")
    assert not bruhat_leq("z1", "z2") and not bruhat_leq("s1", "s2")
    assert not bruhat_leq("w0", "1")


@pytest.mark.parametrize(
    "small,big",
    [(("1", "1"), ("s1", "1")), (("s1", "s2"), ("z2", "w0")), (("z1", "z1"), ("w0", "w0"))],
)
def test_closure_witness(small, big):
    s, b = CellLabel(*small), CellLabel(*big)
    assert closure_order(s, b)
    assert closure_witness(s, b).passed


def test_closure_respects_dimension():
    for a in CELLS:
        for b in CELLS:
            if a != b and closure_order(a, b):
                assert cell_dim(a) < cell_dim(b)


def test_closure_order_is_partial_order():
    for a in CELLS:
        assert closure_order(a, a)
        assert closure_order(CellLabel("1", "1"), a)
        assert closure_order(a, CellLabel("w0", "w0"))
        for b in CELLS:
            if a != b and closure_order(a, b):
                assert not closure_order(b, a)
            for c in CELLS:
                if closure_order(a, b) and closure_order(b, c):
                    assert closure_order(a, c)
