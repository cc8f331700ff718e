"""Orbits of SL3(R) on triples of complete flags, and the orbit integrals over them.

Exact rational algebra (Bruhat cells, orbit classification, stabilizers,
closure relations) lives in ``exact``, ``decomp`` and ``orbits``; floating-point
Iwasawa and the Monte-Carlo side live in ``decomp`` and ``analysis``.
"""

from .exact import ExactMatrix, Unipotent, Diagonal, weyl
from .orbits import CellLabel, TriplePoint, canonicalize, orbit_of, enumerate_orbits

__version__ = "0.1.0"

__all__ = [
    "ExactMatrix",
    "Unipotent",
    "Diagonal",
    "weyl",
    "CellLabel",
    "TriplePoint",
    "canonicalize",
    "orbit_of",
    "enumerate_orbits",
    "__version__",
]
