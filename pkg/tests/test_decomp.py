import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from triflag import randexact
from triflag.analysis.functions import f_xyz
from triflag.decomp import a_rho, bruhat_cell, bruhat_factor, corner_ranks, iwasawa, normalize_det
from triflag.exact import WEYL_NAMES, ExactMatrix, Unipotent, weyl

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.sampled_from(WEYL_NAMES))
def test_bruhat_recovers_cell(seed, w):
    rng = random.Random(seed)
    g = randexact.upper(rng) @ weyl(w).rep @ randexact.unipotent(rng).to_matrix()
    assert bruhat_cell(g).name == w


@given(seeds)
def test_bruhat_factor_roundtrip(seed):
    rng = random.Random(seed)
    g = randexact.sl3(rng)
    p, w, n = bruhat_factor(g)
    assert p.is_upper_triangular()
    assert p @ w.rep @ n.to_matrix() == g


@given(seeds, st.sampled_from(WEYL_NAMES))
def test_bruhat_factor_n_unique_modulo_n_w(seed, w):
    # n is determined up to left multiplication by N_w = N ∩ w^-1 N w
    rng = random.Random(seed)
    n0 = randexact.unipotent(rng).to_matrix()
    wr = weyl(w).rep
    _, w_out, n = bruhat_factor(randexact.upper(rng) @ wr @ n0)
    assert w_out.name == w
    m = n.to_matrix() @ n0.inverse()
    assert (wr @ m @ wr.inverse()).is_upper_triangular()


@given(seeds)
def test_corner_ranks_invariant_under_p(seed):
    rng = random.Random(seed)
    g = randexact.sl3(rng)
    h = randexact.upper(rng) @ g @ randexact.upper(rng)
    assert corner_ranks(g) == corner_ranks(h)


def test_bruhat_rejects_singular():
    with pytest.raises(ValueError):
        bruhat_cell(ExactMatrix(((1, 0, 0), (0, 0, 0), (0, 0, 1))))


def _random_sl3(rng, scale=1.0):
    return normalize_det(np.eye(3) + scale * rng.standard_normal((3, 3)) + 3 * np.eye(3))


@given(seeds)
def test_iwasawa_reconstructs(seed):
    rng = np.random.default_rng(seed)
    g = _random_sl3(rng)
    dec = iwasawa(g)
    assert np.all(dec.a > 0)
    assert np.allclose(np.diag(dec.n), 1) and np.allclose(np.tril(dec.n, -1), 0)
    assert np.allclose(dec.k @ dec.k.T, np.eye(3), atol=1e-13)
    assert np.linalg.det(dec.k) == pytest.approx(1.0)
    assert np.max(np.abs(dec.matrix() - g)) <= 1e-12 * max(1.0, np.abs(g).max())


@given(seeds)
def test_a_rho_matches_iwasawa(seed):
    rng = np.random.default_rng(seed)
    g = _random_sl3(rng)
    assert a_rho(g) == pytest.approx(iwasawa(g).rho, rel=1e-10)


@given(st.floats(-20, 20), st.floats(-20, 20), st.floats(-20, 20))
def test_f_xyz_is_a_rho_of_w0_n(x, y, z):
    w0 = weyl("w0").rep.to_float()
    n = np.array([[1, x, y], [0, 1, z], [0, 0, 1.0]])
    assert float(f_xyz(x, y, z)) == pytest.approx(a_rho(w0 @ n), rel=1e-9)


def test_iwasawa_left_equivariance():
    # a(a0 n0 g) = a0 a(g)
    rng = np.random.default_rng(3)
    g = _random_sl3(rng)
    a0 = np.diag([2.0, 0.25, 2.0])
    n0 = Unipotent(1, 2, 3).to_matrix().to_float()
    assert np.allclose(iwasawa(a0 @ n0 @ g).a, np.diag(a0) * iwasawa(g).a)


def test_iwasawa_rejects_bad_determinant():
    with pytest.raises(ValueError):
        iwasawa(2 * np.eye(3))
