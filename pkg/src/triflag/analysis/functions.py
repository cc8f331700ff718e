"""Closed forms on AN and the catalog of M-invariant test functions on SO(3)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "f_xyz",
    "family_translate",
    "family_translate_inverse",
    "InductionParameter",
    "TestFunction",
    "SIGN_MATRICES",
    "basis_functions",
    "catalog",
    "catalog_triples",
    "positive_indices",
    "independence_triples",
]


def f_xyz(x, y, z):
    """a(w0 n(x,y,z))^rho, in the form ([(1+z^2)(1+x^2+y^2) - (x+zy)^2](1+x^2+y^2))^{-1/2}."""
    x, y, z = np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)
    r = 1.0 + x * x + y * y
    return ((1.0 + z * z) * r - (x + z * y) ** 2) ** -0.5 * r**-0.5


def family_translate(u, s, t, n):
    """Coordinates of a n(1,1,u) a^-1 n for a = diag(e^s, e^t, e^{-s-t})."""
    x, y, z = n
    e1 = np.exp(s - t)
    return (x + e1, y + z * e1 + np.exp(2 * s + t), z + u * np.exp(s + 2 * t))


def family_translate_inverse(u, s, t, n):
    """Coordinates of a^-1 n(1,1,u) a n; the conjugation the orbit integral uses."""
    return family_translate(u, -np.asarray(s), -np.asarray(t), n)


@dataclass(frozen=True)
class InductionParameter:
    """Unitary character a^lambda = exp(i(l1 s + l2 t)) of A."""

    l1: float = 0.0
    l2: float = 0.0

    def __call__(self, s, t):
        return np.exp(1j * (self.l1 * np.asarray(s) + self.l2 * np.asarray(t)))

    def __neg__(self) -> "InductionParameter":
        return InductionParameter(-self.l1, -self.l2)

    @classmethod
    def parse(cls, text: str) -> "InductionParameter":
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 2:
            raise ValueError(f"expected 'l1,l2', got {text!r}")
        return cls(*parts)

    def as_list(self) -> list[float]:
        return [self.l1, self.l2]


SIGN_MATRICES = tuple(
    np.diag(d).astype(float) for d in [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
)

_PAIRS = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]


def _quadratics():
    """Row-wise quadratic monomials k_ij k_il; sign flips of row i cancel."""
    out = []
    for i in range(3):
        for j, l in _PAIRS:
            out.append(((i, j, l),))
    return out


def basis_functions() -> list[tuple]:
    """Constant, the 18 row-wise quadratics, then products of quadratics from distinct rows.

    Each entry is a tuple of (row, col, col) factors; the empty tuple is the constant.
    """
    quads = _quadratics()
    prods = [
        a + b for a, b in itertools.combinations(quads, 2) if a[0][0] != b[0][0]
    ]
    return [()] + quads + prods


def _eval_monomial(factors, k):
    val = np.ones(k.shape[:-2])
    for i, j, l in factors:
        val = val * k[..., i, j] * k[..., i, l]
    return val


@dataclass(frozen=True)
class TestFunction:
    """F(h) = a(h)^{lambda+rho} f_K(kappa(h)) with f_K a combination of catalog monomials."""

    __test__ = False

    lam: InductionParameter = field(default_factory=InductionParameter)
    coeffs: tuple[tuple[int, complex], ...] = ((0, 1.0),)

    def f_k(self, k: np.ndarray) -> np.ndarray:
        basis = _basis()
        out = np.zeros(k.shape[:-2], dtype=complex)
        for idx, c in self.coeffs:
            out = out + c * _eval_monomial(basis[idx], k)
        return out

    def __call__(self, s, t, k):
        """Value at an element with A-coordinates (s, t) and K-part k."""
        s = np.asarray(s)
        t = np.asarray(t)
        return np.exp(2 * s + t) * self.lam(s, t) * self.f_k(k)

    def conj(self) -> "TestFunction":
        return TestFunction(-self.lam, tuple((i, np.conj(c)) for i, c in self.coeffs))

    def with_lambda(self, lam: InductionParameter) -> "TestFunction":
        return TestFunction(lam, self.coeffs)

    def describe(self) -> dict:
        basis = _basis()
        return {
            "lambda": self.lam.as_list(),
            "terms": [
                {
                    "monomial": "*".join(f"k{i + 1}{j + 1}*k{i + 1}{l + 1}" for i, j, l in basis[idx]) or "1",
                    "coeff": [float(np.real(c)), float(np.imag(c))],
                }
                for idx, c in self.coeffs
            ],
        }


_BASIS_CACHE: list = []


def _basis():
    if not _BASIS_CACHE:
        _BASIS_CACHE.extend(basis_functions())
    return _BASIS_CACHE


def catalog() -> list[TestFunction]:
    """Single-monomial M-invariant functions, lambda = 0."""
    return [TestFunction(InductionParameter(), ((i, 1.0),)) for i in range(len(_basis()))]


def positive_indices() -> list[int]:
    """Basis indices whose monomial is a product of squares k_ij^2, constant first."""
    return [i for i, m in enumerate(_basis()) if all(j == l for _, j, l in m)]


def catalog_triples(count: int = 20, lams=None) -> list[tuple[TestFunction, TestFunction, TestFunction]]:
    """A fixed list of test-function triples.

    Slots are drawn from the nonnegative monomials (squares and products of
    squares), so no entry averages to zero over K. The first triple is (1, 1, 1);
    the other slots move with different strides.
    """
    lams = lams or (InductionParameter(),) * 3
    pool = positive_indices()
    n = len(pool)
    triples = [tuple(TestFunction(l, ((pool[0], 1.0),)) for l in lams)]
    j = 1
    while len(triples) < count:
        idx = (pool[j % n], pool[(7 * j + 3) % n], pool[(13 * j + 5) % n])
        triples.append(tuple(TestFunction(l, ((i, 1.0),)) for l, i in zip(lams, idx)))
        j += 1
    return triples


def independence_triples(count: int = 20, lam: float = 0.5) -> list[tuple[TestFunction, TestFunction, TestFunction]]:
    """count - 1 catalog triples at lambda = 0 and one with nonzero imaginary lambdas summing to 0."""
    base = catalog_triples(count)
    lams = (InductionParameter(lam, 0.0), InductionParameter(0.0, lam), InductionParameter(-lam, -lam))
    last = tuple(f.with_lambda(l) for f, l in zip(base[-1], lams))
    return base[:-1] + [last]
