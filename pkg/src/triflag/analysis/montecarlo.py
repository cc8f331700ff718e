"""Importance-sampled orbit integrals over G = ANK.

Haar measure is da dn dk with da = ds dt, dn = dx dy dz and dk the probability
Haar measure on SO(3). The (s, t) plane is sampled in the coordinates
P = t - s, Q = -s - 2t with independent Student-t proposals; x and z are drawn
from two-component Cauchy mixtures centred where either f factor peaks, and y
given (x, z) from a four-component Cauchy mixture at the four ridge lines of
the product f(n) f(n') (see ``kernels``).

The density of I(u) in (P, Q) does not decay: it tends to a positive constant
across the quadrant P, Q > 0 (``pq_marginal`` measures it). I(u) is therefore
infinite and its restriction to s^2 + t^2 <= R^2 grows like R^2. The proposal is
tuned for those restricted integrals. Without a radius the estimator targets the
integral over the sampler's box |P|, |Q| <= CLIP.

Samples are produced in fixed-size chunks; chunk i draws from the i-th child
of ``SeedSequence(seed)`` and chunk sums are merged in index order, so results
are bit-identical for a given seed whatever the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .functions import InductionParameter, TestFunction

__all__ = [
    "Proposal",
    "DEFAULT_PROPOSAL",
    "McEstimate",
    "CHUNK",
    "CLIP",
    "integral_I",
    "integral_I_cutoffs",
    "trilinear_T",
    "trilinear_matrix",
    "RankResult",
    "independence_rank",
    "random_group_element",
    "pq_marginal",
    "InvarianceCheck",
    "invariance_checks",
]

CHUNK = 1 << 16
# sampler box in (P, Q); beyond it e^P overflows the Iwasawa step in double precision
CLIP = 60.0


@dataclass(frozen=True)
class Proposal:
    nu: float = 3.0
    mu_p: float = 3.0
    mu_q: float = 3.0
    sig_p: float = 6.0
    sig_q: float = 6.0

    @property
    def t_const(self) -> float:
        nu = self.nu
        return math.lgamma((nu + 1) / 2) - math.lgamma(nu / 2) - 0.5 * math.log(nu * math.pi)

    def describe(self) -> dict:
        d = asdict(self)
        d["P"] = "t - s, Student-t(nu) with location mu_p and scale sig_p"
        d["Q"] = "-s - 2t, Student-t(nu) with location mu_q and scale sig_q"
        d["x"] = "1/2 Cauchy(0,1) + 1/2 Cauchy(-e^P,1)"
        d["z"] = "1/2 Cauchy(0,1) + 1/2 Cauchy(-u e^Q,1)"
        d["y"] = "equal mixture of Cauchy at 0, xz, y'=0 and y'=x'z' with scales sqrt(1+x^2), sqrt(1+z^2), sqrt(1+x'^2), sqrt(1+z'^2)"
        d["clip"] = CLIP
        return d


DEFAULT_PROPOSAL = Proposal()


@dataclass(frozen=True)
class McEstimate:
    value: complex
    std_error: float
    samples: int
    seed: int

    def to_json(self) -> dict:
        v = self.value
        if isinstance(v, complex) or np.iscomplexobj(v):
            est = [float(np.real(v)), float(np.imag(v))]
        else:
            est = float(v)
        return {"estimate": est, "std_error": float(self.std_error), "samples": self.samples, "seed": self.seed}


class _Sums:
    """Running first and second moments for a vector of (possibly complex) estimands."""

    def __init__(self, k: int):
        self.n = 0
        self.s = np.zeros(k, dtype=complex)
        self.s2 = np.zeros(k)

    def add(self, vals: np.ndarray) -> None:
        # vals: (k, n)
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("non-finite Monte-Carlo sample")
        self.n += vals.shape[1]
        self.s += vals.sum(axis=1)
        self.s2 += (np.abs(vals) ** 2).sum(axis=1)

    def merge(self, other: "_Sums") -> None:
        self.n += other.n
        self.s += other.s
        self.s2 += other.s2

    def estimates(self, seed: int, real: bool) -> list[McEstimate]:
        mean = self.s / self.n
        var = np.maximum(self.s2 / self.n - np.abs(mean) ** 2, 0.0) * self.n / max(self.n - 1, 1)
        se = np.sqrt(var / self.n)
        out = []
        for m, e in zip(mean, se):
            out.append(McEstimate(float(m.real) if real else complex(m), float(e), self.n, seed))
        return out


def _chunks(samples: int) -> list[int]:
    if samples <= 0:
        raise ValueError("samples must be positive")
    full, rest = divmod(samples, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _raw(rng: np.random.Generator, n: int, nu: float, with_k: bool) -> dict:
    raw = {
        "tp": rng.standard_t(nu, n),
        "tq": rng.standard_t(nu, n),
        "ux": rng.random(n),
        "uz": rng.random(n),
        "uy": rng.random(n),
        "cx": rng.integers(0, 2, n),
        "cz": rng.integers(0, 2, n),
        "cy": rng.integers(0, 4, n),
    }
    if with_k:
        raw["gk"] = rng.standard_normal((n, 4))
    return raw


def _run(samples: int, seed: int, work, workers: int, k: int) -> _Sums:
    sizes = _chunks(samples)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def job(i):
        return work(np.random.default_rng(children[i]), sizes[i])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    total = _Sums(k)
    for p in parts:
        total.merge(p)
    return total


def _transform(rng, n, u, proposal, with_k):
    raw = _raw(rng, n, proposal.nu, with_k)
    p = proposal.mu_p + proposal.sig_p * raw["tp"]
    q = proposal.mu_q + proposal.sig_q * raw["tq"]
    dead = (np.abs(p) > CLIP) | (np.abs(q) > CLIP)
    if dead.any():
        # run the kernel on a harmless point, then give it zero weight
        raw["tp"] = np.where(dead, 0.0, raw["tp"])
        raw["tq"] = np.where(dead, 0.0, raw["tq"])
    tr = kernels.transform(raw, u, proposal)
    if dead.any():
        tr[8, dead] = -np.inf
    return raw, tr


def _check_u(u: float) -> float:
    u = float(u)
    if u == 0 or not math.isfinite(u):
        raise ValueError("u must be a nonzero real number (the family is parametrized by u in R^x)")
    return u


def integral_I_cutoffs(
    u: float,
    radii: Sequence[float | None],
    samples: int,
    seed: int,
    proposal: Proposal = DEFAULT_PROPOSAL,
    workers: int = 1,
) -> list[McEstimate]:
    """I(u) restricted to s^2 + t^2 <= R^2 for each R (None = no cutoff), on common samples."""
    u = _check_u(u)
    radii = list(radii)

    def work(rng, n):
        _, tr = _transform(rng, n, u, proposal, with_k=False)
        vals = kernels.i_integrand(tr)
        rr = tr[0] ** 2 + tr[1] ** 2
        rows = [vals if R is None else np.where(rr <= R * R, vals, 0.0) for R in radii]
        acc = _Sums(len(radii))
        acc.add(np.array(rows))
        return acc

    return _run(samples, seed, work, workers, len(radii)).estimates(seed, real=True)


def integral_I(
    u: float,
    samples: int,
    seed: int,
    radius: float | None = None,
    proposal: Proposal = DEFAULT_PROPOSAL,
    workers: int = 1,
) -> McEstimate:
    """Monte-Carlo estimate of the five-dimensional integral I(u)."""
    return integral_I_cutoffs(u, [radius], samples, seed, proposal, workers)[0]


def _eval_slot(fn: TestFunction, coords: np.ndarray, kap: np.ndarray) -> np.ndarray:
    # a^rho is carried in the common log factor; only lambda and f_K here
    return fn.lam(coords[:, 0], coords[:, 1]) * fn.f_k(kap)


def trilinear_matrix(
    u: float,
    triples: Sequence[tuple[TestFunction, TestFunction, TestFunction]],
    samples: int,
    seed: int,
    y: np.ndarray | None = None,
    proposal: Proposal = DEFAULT_PROPOSAL,
    workers: int = 1,
) -> list[McEstimate]:
    """T_u on each triple, right-translated by y, sharing one sample stream.

    T_u(F1, F2, F3) = int_G F1(g) F2(w0 g) F3(w0 n(1,1,u) g) dg.
    """
    u = _check_u(u)
    Y = np.eye(3) if y is None else np.asarray(y, dtype=float)

    def work(rng, n):
        raw, tr = _transform(rng, n, u, proposal, with_k=True)
        k = kernels.rotations(raw["gk"])
        ky = k @ Y
        coords, kap = kernels.iwasawa_parts(tr, ky)
        rho = 2 * coords[:, :, 0] + coords[:, :, 1]
        common = np.exp(tr[8] + rho.sum(axis=1))
        cache: dict = {}
        rows = []
        for triple in triples:
            val = common.astype(complex)
            for j, fn in enumerate(triple):
                key = (j, fn)
                if key not in cache:
                    cache[key] = _eval_slot(fn, coords[:, j], kap[:, j])
                val = val * cache[key]
            rows.append(val)
        acc = _Sums(len(triples))
        acc.add(np.array(rows))
        return acc

    return _run(samples, seed, work, workers, len(triples)).estimates(seed, real=False)


def trilinear_T(
    u: float,
    lams: Sequence[InductionParameter],
    fns: Sequence[TestFunction],
    samples: int,
    seed: int,
    y: np.ndarray | None = None,
    proposal: Proposal = DEFAULT_PROPOSAL,
    workers: int = 1,
) -> McEstimate:
    triple = tuple(f.with_lambda(l) for f, l in zip(fns, lams))
    return trilinear_matrix(u, [triple], samples, seed, y, proposal, workers)[0]


@dataclass(frozen=True)
class RankResult:
    rank: int
    singular_values: tuple[float, ...]
    threshold: float
    max_std_error: float
    inconclusive: bool
    values: np.ndarray
    std_errors: np.ndarray


def independence_rank(
    us: Sequence[float],
    triples: Sequence[tuple[TestFunction, TestFunction, TestFunction]],
    samples: int,
    seed: int,
    proposal: Proposal = DEFAULT_PROPOSAL,
    workers: int = 1,
    threshold_factor: float = 10.0,
) -> RankResult:
    """Numerical rank of the matrix T_{u_i}(triple_j).

    The threshold is threshold_factor times the largest entry standard error.
    The result is flagged inconclusive when a singular value falls between one
    standard error and the threshold, where it can be neither counted nor dismissed.
    """
    if len(triples) < len(us):
        raise ValueError("need at least as many triples as values of u")
    vals = np.empty((len(us), len(triples)), dtype=complex)
    ses = np.empty((len(us), len(triples)))
    for i, u in enumerate(us):
        row = trilinear_matrix(u, triples, samples, seed, proposal=proposal, workers=workers)
        vals[i] = [e.value for e in row]
        ses[i] = [e.std_error for e in row]
    sv = np.linalg.svd(vals, compute_uv=False)
    max_se = float(ses.max())
    thr = threshold_factor * max_se
    rank = int((sv > thr).sum())
    inconclusive = bool(np.any((sv > max_se) & (sv <= thr)))
    return RankResult(rank, tuple(float(s) for s in sv), thr, max_se, inconclusive, vals, ses)


def random_group_element(rng: np.random.Generator, scale: float = 0.2) -> np.ndarray:
    """exp of a random traceless matrix with entries of size ~scale: an element of SL3 near 1."""
    from scipy.linalg import expm

    X = scale * rng.standard_normal((3, 3))
    X -= np.trace(X) / 3 * np.eye(3)
    return expm(X)


def pq_marginal(u: float, P: float, Q: float, samples: int, seed: int) -> McEstimate:
    """Density of I(u) with respect to ds dt at the point P = t - s, Q = -s - 2t.

    This is e^{P+Q} times the integral of f(n) f(n') over N, estimated with the
    conditional (x, y, z) proposal. A positive limit along a ray means I diverges.
    """
    u = _check_u(u)
    prop = Proposal(nu=1e6, mu_p=float(P), mu_q=float(Q), sig_p=1.0, sig_q=1.0)

    def work(rng, n):
        raw = _raw(rng, n, prop.nu, with_k=False)
        raw["tp"] = np.zeros(n)
        raw["tq"] = np.zeros(n)
        tr = kernels.transform(raw, u, prop)
        # undo the (P, Q) proposal density and the 1/3 Jacobian: a point mass here
        tr[8] += 2 * prop.t_const + math.log(3.0)
        acc = _Sums(1)
        acc.add(kernels.i_integrand(tr)[None, :])
        return acc

    return _run(samples, seed, work, 1, 1).estimates(seed, real=True)[0]


@dataclass(frozen=True)
class InvarianceCheck:
    u: float
    triple: int
    y: np.ndarray
    base: McEstimate
    moved: McEstimate
    n_sigma: float

    @property
    def deviation(self) -> float:
        return abs(self.moved.value - self.base.value)

    @property
    def tolerance(self) -> float:
        return self.n_sigma * math.hypot(self.base.std_error, self.moved.std_error)

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


def invariance_checks(
    us: Sequence[float],
    triples: Sequence[tuple[TestFunction, TestFunction, TestFunction]],
    samples: int,
    seed: int,
    count: int = 20,
    y_seed: int = 1,
    n_sigma: float = 3.0,
    base: RankResult | None = None,
    proposal: Proposal = DEFAULT_PROPOSAL,
    workers: int = 1,
) -> list[InvarianceCheck]:
    """Compare T_u(F) with T_u(pi(y)F) for count random y near the identity.

    Check i uses triple i mod len(triples) and u = us[i mod len(us)]. Both sides
    share the seed, so the comparison runs on common random numbers.
    """
    rng = np.random.default_rng(y_seed)
    out = []
    for i in range(count):
        j = i % len(triples)
        r = i % len(us)
        u = us[r]
        y = random_group_element(rng)
        if base is not None:
            b = McEstimate(complex(base.values[r, j]), float(base.std_errors[r, j]), samples, seed)
        else:
            b = trilinear_matrix(u, [triples[j]], samples, seed, proposal=proposal, workers=workers)[0]
        m = trilinear_matrix(u, [triples[j]], samples, seed, y=y, proposal=proposal, workers=workers)[0]
        out.append(InvarianceCheck(float(u), j, y, b, m, n_sigma))
    return out
