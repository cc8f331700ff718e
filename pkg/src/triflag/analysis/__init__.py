"""Closed forms, quadrature and Monte-Carlo estimates for the orbit integrals."""

from ._accel import backend, set_backend
from .functions import (
    InductionParameter,
    TestFunction,
    catalog_triples,
    f_xyz,
    family_translate,
    independence_triples,
)
from .montecarlo import (
    DEFAULT_PROPOSAL,
    McEstimate,
    Proposal,
    independence_rank,
    integral_I,
    integral_I_cutoffs,
    invariance_checks,
    pq_marginal,
    trilinear_T,
    trilinear_matrix,
)
from .quadrature import decay_table, loglog_slope, phi

__all__ = [
    "backend",
    "set_backend",
    "InductionParameter",
    "TestFunction",
    "catalog_triples",
    "independence_triples",
    "f_xyz",
    "family_translate",
    "DEFAULT_PROPOSAL",
    "McEstimate",
    "Proposal",
    "independence_rank",
    "integral_I",
    "integral_I_cutoffs",
    "invariance_checks",
    "pq_marginal",
    "trilinear_T",
    "trilinear_matrix",
    "decay_table",
    "loglog_slope",
    "phi",
]
