from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from triflag.exact import (
    WEYL_NAMES,
    Diagonal,
    ExactMatrix,
    Unipotent,
    as_rational,
    diag_conj,
    n_v_pattern,
    nullspace,
    rank,
    weyl,
    weyl_mul,
    weyl_table,
)

rationals = st.builds(Fraction, st.integers(-30, 30), st.integers(1, 12))
nonzero = st.builds(Fraction, st.integers(1, 30) | st.integers(-30, -1), st.integers(1, 12))
unipotents = st.builds(Unipotent, rationals, rationals, rationals)
diagonals = st.builds(Diagonal.from_ab, nonzero, nonzero)
# small integer entries hit singular matrices often enough to exercise that branch
entries = rationals | st.integers(-1, 1).map(Fraction)
matrices = st.lists(st.lists(entries, min_size=3, max_size=3), min_size=3, max_size=3).map(ExactMatrix)


@given(unipotents, unipotents)
def test_unipotent_product_matches_matrices(a, b):
    assert (a * b).to_matrix() == a.to_matrix() @ b.to_matrix()


@given(unipotents)
def test_unipotent_inverse(n):
    assert (n * n.inverse()) == Unipotent()
    assert n.inverse().to_matrix() == n.to_matrix().inverse()


@given(diagonals, unipotents)
def test_diag_conj_matches_matrices(d, n):
    m = d.to_matrix() @ n.to_matrix() @ d.inverse().to_matrix()
    assert diag_conj(d, n).to_matrix() == m


@given(matrices)
def test_inverse_when_invertible(m):
    if m.det() == 0:
        with pytest.raises(ZeroDivisionError):
            m.inverse()
    else:
        assert m @ m.inverse() == ExactMatrix.identity()


@given(matrices, matrices)
def test_det_multiplicative(a, b):
    assert (a @ b).det() == a.det() * b.det()


def test_weyl_group_is_s3():
    table = weyl_table()
    names = set(WEYL_NAMES)
    assert all(v in names for v in table.values())
    for a in WEYL_NAMES:
        assert sorted(table[(a, b)] for b in WEYL_NAMES) == sorted(names)
    assert weyl_mul("s1", "s1").name == "1"
    assert weyl_mul("s1", "s2").name in ("z1", "z2")
    assert weyl("w0").length == 3
    assert weyl_mul("s1", weyl_mul("s2", "s1")).name == "w0"
    assert weyl_mul("s2", weyl_mul("s1", "s2")).name == "w0"


@pytest.mark.parametrize("v", WEYL_NAMES)
def test_weyl_reps_are_special_orthogonal(v):
    r = weyl(v).rep
    assert r.det() == 1
    assert r @ r.transpose() == ExactMatrix.identity()


@pytest.mark.parametrize("v", WEYL_NAMES)
def test_n_v_pattern_is_n_cap_conjugate(v):
    # a coordinate is free in N_v iff conjugating its root matrix by v stays in N
    vr = weyl(v).rep
    free = n_v_pattern(v).free()
    for k, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
        e = [[Fraction(int(a == b)) for b in range(3)] for a in range(3)]
        e[i][j] = Fraction(1)
        m = vr @ ExactMatrix(e) @ vr.inverse()
        assert m.is_upper_triangular() == free[k]
    assert sum(free) == 3 - weyl(v).length


def test_n_v_extremes():
    assert n_v_pattern("1").free() == (True, True, True)
    assert n_v_pattern("w0").free() == (False, False, False)


@given(matrices)
def test_nullspace_dimension(m):
    rows = [list(r) for r in m.rows]
    ns = nullspace(rows, 3)
    assert len(ns) == 3 - rank(rows)
    for vec in ns:
        assert all(sum(a * b for a, b in zip(r, vec)) == 0 for r in rows)


def test_as_rational_parses_strings():
    assert as_rational("3/4") == Fraction(3, 4)
    assert as_rational(2) == Fraction(2)


def test_diagonal_requires_unit_determinant():
    with pytest.raises(ValueError):
        Diagonal(2, 1, 1)
