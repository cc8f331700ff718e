"""Random exact group elements for property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .exact import Diagonal, ExactMatrix, Unipotent, WEYL_NAMES, weyl


def rational(rng: random.Random, size: int = 9, nonzero: bool = False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-size, size), rng.randint(1, size))
        if q or not nonzero:
            return q


def unipotent(rng: random.Random, mask=(True, True, True), size: int = 9) -> Unipotent:
    x, y, z = (rational(rng, size) if free else 0 for free in mask)
    return Unipotent(x, y, z)


def diagonal(rng: random.Random, size: int = 9) -> Diagonal:
    return Diagonal.from_ab(rational(rng, size, nonzero=True), rational(rng, size, nonzero=True))


def upper(rng: random.Random, size: int = 9) -> ExactMatrix:
    """Random element of P."""
    return diagonal(rng, size).to_matrix() @ unipotent(rng, size=size).to_matrix()


def sl3(rng: random.Random, size: int = 5) -> ExactMatrix:
    """Random element of SL3(Q), spread over all Bruhat cells."""
    w = weyl(rng.choice(WEYL_NAMES)).rep
    lower = unipotent(rng, size=size).to_matrix().transpose()
    return upper(rng, size) @ w @ lower @ unipotent(rng, size=size).to_matrix()
