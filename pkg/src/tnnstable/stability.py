"""Stability and Rayleigh tests for multiaffine polynomials.

Exact routes:

* Grassmannian oracle -- a polynomial whose coefficients satisfy the Plücker
  relations is stable exactly when the point is totally nonnegative.
* Phase refutation -- a homogeneous stable polynomial has all coefficients of
  one phase.
* Degree-2 certificate -- for real homogeneous quadratics each Rayleigh
  difference is a quadratic form, decided by an exact PSD test.

Everything else falls back on :func:`falsify_stability`, a randomized search
whose refutations are confirmed in exact arithmetic and whose failures to
refute certify nothing.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import comb

import numpy as np
from gmpy2 import mpq
from scipy.optimize import minimize

from .errors import DomainError, PreconditionError
from .gaussian import ZERO, GaussianRational, rational
from .grassmann import NotGrassmannian, is_tnn_point, polynomial_to_plucker
from .linalg import RationalMatrix, _bareiss_det, is_psd, negative_direction
from .poly import (
    MultiaffinePoly,
    NotSamePhase,
    SparsePoly,
    elementary_symmetric,
    indices_of,
    mask_of,
    phase_normalize,
    subsets,
)

log = logging.getLogger(__name__)

#: Relations beyond this count make the Grassmannian oracle too slow to try.
ORACLE_MAX_RELATIONS = 250_000
#: Imaginary parts of an accepted zero must be at least this large.
INTERIOR_MARGIN = 1e-6
RESIDUAL_TOL = 1e-10


class Status(str, Enum):
    STABLE_CERTIFIED = "StableCertified"
    STABLE_ORACLE = "StableOracle"
    NOT_STABLE = "NotStable"
    NO_COUNTEREXAMPLE = "NoCounterexampleFound"


# -- witnesses ----------------------------------------------------------------------------

@dataclass(frozen=True)
class RayleighWitness:
    """``Delta_ij f(point) = value < 0`` at a real point; from a negative principal minor."""

    i: int
    j: int
    point: tuple
    value: object
    minor: tuple[int, ...] = ()
    minor_value: object = None
    kind = "rayleigh"


@dataclass(frozen=True)
class ZeroWitness:
    """An exact zero of ``f`` in the open upper half plane (solved along ``coordinate``)."""

    point: tuple[GaussianRational, ...]
    coordinate: int
    residual: float
    kind = "zero"


@dataclass(frozen=True)
class PhaseWitness:
    """Two coefficients of a homogeneous polynomial with different phases."""

    pair: NotSamePhase
    kind = "phase"


@dataclass(frozen=True)
class StabilityVerdict:
    status: Status
    witness: object = None
    certificate: tuple[str, ...] = ()

    @property
    def stable(self) -> bool | None:
        if self.status in (Status.STABLE_CERTIFIED, Status.STABLE_ORACLE):
            return True
        if self.status is Status.NOT_STABLE:
            return False
        return None

    @property
    def certified(self) -> bool:
        """True for every exact verdict; sampler outcomes without a witness are not."""
        return self.status is not Status.NO_COUNTEREXAMPLE


@dataclass(frozen=True)
class OracleInapplicable:
    """The coefficients violate a Plücker relation, so the oracle says nothing."""

    reason: object
    kind = "Inapplicable"


# -- Rayleigh differences ---------------------------------------------------------------------

def _require_real(f: MultiaffinePoly, what: str) -> None:
    if not f.is_real():
        raise DomainError(f"{what} requires real coefficients")


def rayleigh_difference(f: MultiaffinePoly, i: int, j: int) -> SparsePoly:
    """``d_i f * d_j f - f * d_i d_j f`` as an exact sparse polynomial."""
    _require_real(f, "Rayleigh difference")
    if i == j:
        raise PreconditionError("Rayleigh difference needs i != j")
    s = f.to_sparse()
    di, dj = s.partial(i), s.partial(j)
    return di * dj - s * di.partial(j)


def _split_pair(f: MultiaffinePoly, i: int, j: int):
    """``f = A + B x_i + C x_j + D x_i x_j`` with A..D free of ``x_i, x_j``."""
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    parts = ({}, {}, {}, {})
    for m, c in f.terms.items():
        slot = (1 if m & bi else 0) + (2 if m & bj else 0)
        parts[slot][m & ~(bi | bj)] = c
    return parts


def gram_matrix(q: SparsePoly) -> RationalMatrix:
    """Symmetric matrix of a quadratic form; cross terms are split evenly."""
    n = q.n
    g = [[ZERO] * n for _ in range(n)]
    for e, c in q.terms.items():
        if sum(e) != 2:
            raise PreconditionError("not a quadratic form")
        idx = [v for v, k in enumerate(e) for _ in range(k)]
        a, b = idx
        if a == b:
            g[a][a] = g[a][a] + c
        else:
            half = c / 2
            g[a][b] = g[a][b] + half
            g[b][a] = g[b][a] + half
    return RationalMatrix._trusted(g)


def _integer_point(v) -> tuple:
    den = reduce(lambda x, y: x * y // math.gcd(x, y), (int(mpq(x).denominator) for x in v), 1)
    return tuple(mpq(x) * den for x in v)


def _check_deg2(f: MultiaffinePoly) -> None:
    if f.is_zero() or not f.is_homogeneous() or f.degree() != 2:
        raise PreconditionError("exact test needs a nonzero homogeneous quadratic")
    _require_real(f, "exact degree-2 test")


def exact_stability_deg2(f: MultiaffinePoly) -> StabilityVerdict:
    """Decide stability of a real homogeneous quadratic via PSD Gram matrices."""
    _check_deg2(f)
    for i in range(1, f.n + 1):
        for j in range(i + 1, f.n + 1):
            delta = rayleigh_difference(f, i, j)
            if delta.is_zero():
                continue
            g = gram_matrix(delta)
            cert = is_psd(g)
            if cert.ok:
                continue
            v = negative_direction(g)
            point = _integer_point(v)
            value = delta.evaluate_exact(point)
            assert value.re < 0, "congruence direction must be negative"
            return StabilityVerdict(
                Status.NOT_STABLE,
                RayleighWitness(i, j, point, value.re, cert.indices, cert.value.re),
                ("rayleigh-gram-psd",),
            )
    return StabilityVerdict(Status.STABLE_CERTIFIED, None, ("rayleigh-gram-psd",))


def inequality_4vars(a12, a13, a14, a23, a24, a34) -> tuple[mpq, bool]:
    """Discriminant expression for ``sum a_ij x_i x_j`` on four variables; stable iff ``<= 0``."""
    a12, a13, a14, a23, a24, a34 = (rational(x) for x in (a12, a13, a14, a23, a24, a34))
    if min(a12, a13, a14, a23, a24, a34) < 0:
        raise PreconditionError("coefficients must be nonnegative")
    p, q, r = a12 * a34, a13 * a24, a14 * a23
    lhs = p * p + q * q + r * r - 2 * p * q - 2 * q * r - 2 * p * r
    return lhs, lhs <= 0


# -- the Grassmannian oracle ---------------------------------------------------------------------

def _relation_count(n: int, k: int) -> int:
    return comb(n, k - 1) * comb(n, k + 1) if 0 < k < n else 0


def oracle_applicable(f: MultiaffinePoly) -> bool:
    """Homogeneous, nonzero and with few enough relations to enumerate."""
    return (not f.is_zero() and f.is_homogeneous()
            and _relation_count(f.n, f.degree()) <= ORACLE_MAX_RELATIONS)


def grassmann_stability_oracle(f: MultiaffinePoly) -> StabilityVerdict | OracleInapplicable:
    """Stable iff the represented point is totally nonnegative (only for Grassmannian input)."""
    if f.is_zero():
        raise PreconditionError("zero polynomial")
    if not f.is_homogeneous():
        raise PreconditionError("oracle needs a homogeneous polynomial")
    point = polynomial_to_plucker(f)
    if isinstance(point, NotGrassmannian):
        return OracleInapplicable(point)
    cert = is_tnn_point(point.plucker)
    if cert.ok:
        return StabilityVerdict(Status.STABLE_ORACLE, cert, ("plucker-relations", "tnn-point"))
    return StabilityVerdict(Status.NOT_STABLE, PhaseWitness(cert.witness),
                            ("plucker-relations", "phase"))


# -- numeric falsifier ---------------------------------------------------------------------------

class _Compiled:
    """Term arrays of a polynomial for vectorized float evaluation."""

    def __init__(self, f: MultiaffinePoly):
        self.n = f.n
        items = f.sorted_terms()
        self.masks = np.array([m for m, _ in items], dtype=np.int64)
        self.coeffs = np.array([complex(c) for _, c in items], dtype=complex)
        self.inc = ((self.masks[:, None] >> np.arange(f.n)) & 1).astype(float)
        self.active = [j for j in range(f.n) if self.inc[:, j].any()]

    def monomials(self, u: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            return np.exp(np.log(u) @ self.inc.T) * self.coeffs

    def roots(self, u: np.ndarray, j: int, mono: np.ndarray | None = None) -> np.ndarray:
        """Zero of ``f`` along coordinate ``j`` with the other coordinates fixed."""
        if mono is None:
            mono = self.monomials(u)
        with_j = self.inc[:, j] > 0
        with np.errstate(all="ignore"):
            b = mono[:, with_j].sum(axis=1) / u[:, j]
            a = mono[:, ~with_j].sum(axis=1)
            r = -a / b
        r[~np.isfinite(r)] = np.nan
        return r


def _score(r: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        s = r.imag / np.maximum(1.0, np.abs(r))
    return np.where(np.isnan(s), -np.inf, s)


def _exact_zero(f: MultiaffinePoly, u: np.ndarray, j: int):
    """Snap ``u`` (minus coordinate ``j``) to rationals and solve for ``u_j`` exactly."""
    for limit in (10 ** 6, 10 ** 12, None):
        pt = []
        for z in u:
            re, im = Fraction(float(z.real)), Fraction(float(z.imag))
            if limit is not None:
                re, im = re.limit_denominator(limit), im.limit_denominator(limit)
            pt.append(GaussianRational(re, im))
        bit = 1 << j
        a, b = ZERO, ZERO
        for m, c in f.terms.items():
            v = c
            for idx in indices_of(m & ~bit):
                v = v * pt[idx - 1]
            if m & bit:
                b = b + v
            else:
                a = a + v
        if not b:
            continue
        pt[j] = -a / b
        if all(z.im >= INTERIOR_MARGIN for z in pt) and not f.evaluate_exact(pt):
            return tuple(pt)
    return None


def residual_bound(f: MultiaffinePoly, point) -> float:
    scale = sum(abs(complex(c)) for c in f.terms.values())
    norm = max(abs(complex(z)) for z in point)
    return RESIDUAL_TOL * scale * max(1.0, norm) ** max(f.degree(), 0)


def falsify_stability(f: MultiaffinePoly, samples: int = 10_000, seed: int = 0,
                      refine: int = 3) -> StabilityVerdict:
    """Search the upper half plane for a zero of ``f``.

    Points are sampled with real parts in [-3, 3] and imaginary parts in
    (1e-3, 3]; ``f`` is affine in each coordinate, so the remaining coordinate
    is solved for directly.  The most promising candidates are refined by
    Nelder-Mead on the imaginary part of that root.  A reported zero is
    re-solved in exact rational arithmetic, lies at least ``1e-6`` inside every
    half plane and meets the residual bound of :func:`residual_bound`.
    """
    if f.is_zero():
        raise PreconditionError("zero polynomial")
    if f.degree() <= 0:
        return StabilityVerdict(Status.NO_COUNTEREXAMPLE, None, ("sampler",))
    comp = _Compiled(f)
    rng = np.random.default_rng(seed)
    best: list[tuple[float, np.ndarray, int]] = []
    chunk = max(1, min(samples, 200_000 // max(1, len(comp.masks))))
    done = 0
    while done < samples:
        size = min(chunk, samples - done)
        re = rng.uniform(-3.0, 3.0, size=(size, f.n))
        im = 3.0 - rng.uniform(0.0, 3.0 - 1e-3, size=(size, f.n))
        u = re + 1j * im
        mono = comp.monomials(u)
        for j in comp.active:
            r = comp.roots(u, j, mono)
            sc = _score(r)
            order = np.argsort(-sc)[:refine]
            for idx in order:
                if not np.isfinite(sc[idx]):
                    continue
                pt = u[idx].copy()
                pt[j] = r[idx]
                best.append((float(sc[idx]), pt, j))
                if sc[idx] > 1e-4:
                    verdict = _confirm(f, pt, j)
                    if verdict is not None:
                        return verdict
        best.sort(key=lambda t: -t[0])
        del best[refine:]
        done += size
    for _, pt, j in best:
        refined = _nelder_mead(comp, pt, j)
        if refined is not None:
            verdict = _confirm(f, refined, j)
            if verdict is not None:
                return verdict
    return StabilityVerdict(Status.NO_COUNTEREXAMPLE, None, ("sampler",))


def _confirm(f: MultiaffinePoly, pt: np.ndarray, j: int) -> StabilityVerdict | None:
    exact = _exact_zero(f, pt, j)
    if exact is None:
        return None
    residual = abs(f.evaluate([complex(z) for z in exact]))
    if residual > residual_bound(f, exact):
        log.debug("exact zero rejected by float residual %g", residual)
        return None
    return StabilityVerdict(Status.NOT_STABLE, ZeroWitness(exact, j + 1, residual), ("sampler", "exact-zero"))


def _nelder_mead(comp: _Compiled, pt: np.ndarray, j: int) -> np.ndarray | None:
    others = [l for l in range(comp.n) if l != j]

    def unpack(x):
        u = pt.copy()
        k = len(others)
        u[others] = np.clip(x[:k], -1e3, 1e3) + 1j * (INTERIOR_MARGIN + np.exp(np.clip(x[k:], -30.0, 7.0)))
        return u

    def objective(x):
        u = unpack(x)
        r = comp.roots(u[None, :], j)[0]
        if not np.isfinite(r):
            return 1.0
        return -r.imag / max(1.0, abs(r))

    x0 = np.concatenate([pt[others].real, np.log(np.maximum(pt[others].imag - INTERIOR_MARGIN, 1e-12))])
    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"maxiter": 100 * max(1, len(x0)), "xatol": 1e-10, "fatol": 1e-14})
    if res.fun >= -1e-4:
        return None
    u = unpack(res.x)
    u[j] = comp.roots(u[None, :], j)[0]
    return u


def is_zero_witness_valid(f: MultiaffinePoly, w: ZeroWitness) -> bool:
    pt = [GaussianRational.coerce(z) for z in w.point]
    return len(pt) == f.n and all(z.im > 0 for z in pt) and not f.evaluate_exact(pt)


# -- decision pipeline -------------------------------------------------------------------------

METHODS = ("auto", "exact", "oracle", "sample")


def decide_stability(f: MultiaffinePoly, method: str = "auto", samples: int = 10_000,
                     seed: int = 0):
    """Run the cascade oracle -> exact -> sampler (or a single stage).

    Returns a :class:`StabilityVerdict`, or :class:`OracleInapplicable` when only
    the oracle was requested and it does not apply.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if f.is_zero():
        return StabilityVerdict(Status.STABLE_CERTIFIED, None, ("zero-polynomial",))
    homogeneous = f.is_homogeneous()
    if method in ("auto", "oracle"):
        if oracle_applicable(f):
            res = grassmann_stability_oracle(f)
            if isinstance(res, StabilityVerdict):
                return res
            if method == "oracle":
                return res
        elif method == "oracle":
            if not homogeneous:
                raise PreconditionError("oracle needs a homogeneous polynomial")
            raise PreconditionError("too many Plücker relations for the oracle")
    if method in ("auto", "exact"):
        verdict = _exact_route(f)
        if verdict is not None:
            return verdict
        if method == "exact":
            raise PreconditionError("no exact method applies (needs homogeneous input)")
    return falsify_stability(f, samples, seed)


def _exact_route(f: MultiaffinePoly) -> StabilityVerdict | None:
    if not f.is_homogeneous():
        return None
    if f.degree() <= 1:
        return _linear_verdict(f)
    phase = phase_normalize(f)
    if not phase.ok:
        return StabilityVerdict(Status.NOT_STABLE, PhaseWitness(phase), ("phase",))
    if f.degree() == 2:
        v = exact_stability_deg2(phase.normalized)
        return StabilityVerdict(v.status, v.witness, ("phase",) + v.certificate)
    return None


def _linear_verdict(f: MultiaffinePoly) -> StabilityVerdict:
    """Constants and linear forms: a linear form is stable iff its coefficients share a phase."""
    if f.degree() == 0:
        return StabilityVerdict(Status.STABLE_CERTIFIED, None, ("constant",))
    phase = phase_normalize(f)
    if not phase.ok:
        return StabilityVerdict(Status.NOT_STABLE, PhaseWitness(phase), ("phase",))
    return StabilityVerdict(Status.STABLE_CERTIFIED, None, ("phase", "linear-form"))


# -- Rayleigh sampling -------------------------------------------------------------------------

@dataclass(frozen=True)
class NoViolationFound:
    points_checked: int
    ok = True
    kind = "NoViolationFound"


@dataclass(frozen=True)
class RayleighViolation:
    i: int
    j: int
    point: tuple
    value: object
    ok = False
    kind = "Violation"


def rayleigh_value(f: MultiaffinePoly, i: int, j: int, point) -> mpq:
    """``Delta_ij f`` at a rational point, through ``f = A + B x_i + C x_j + D x_i x_j``.

    ``Delta_ij f = B C - A D``; this avoids forming the sparse product.
    """
    pt = [rational(x) for x in point]
    cache: dict[int, mpq] = {0: mpq(1)}

    def mono(m):
        v = cache.get(m)
        if v is None:
            low = m & -m
            v = mono(m ^ low) * pt[low.bit_length() - 1]
            cache[m] = v
        return v

    vals = []
    for part in _split_pair(f, i, j):
        s = mpq(0)
        for m, c in part.items():
            s += c.re * mono(m)
        vals.append(s)
    a, b, c, d = vals
    return b * c - a * d


def check_rayleigh(f: MultiaffinePoly, samples: int = 1000, seed: int = 0) -> NoViolationFound | RayleighViolation:
    """Sample ``Delta_ij f >= 0`` on the nonnegative orthant exactly (not a decision procedure)."""
    _require_real(f, "Rayleigh check")
    n = f.n
    rng = random.Random(seed)
    points = [tuple(mpq(1) for _ in range(n))]
    for l in range(n):
        points.append(tuple(mpq(1 if t == l else 0) for t in range(n)))
    for _ in range(samples):
        points.append(tuple(mpq(rng.randint(0, 20), rng.randint(1, 10)) for _ in range(n)))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    for pt in points:
        for i, j in pairs:
            v = rayleigh_value(f, i, j, pt)
            if v < 0:
                return RayleighViolation(i, j, pt, v)
    return NoViolationFound(len(points))


# -- stable constructors ---------------------------------------------------------------------------

def sq_minor_poly(m: RationalMatrix) -> MultiaffinePoly:
    """``sum_I |det M[I]|^2 x^I`` over the k-subsets of rows of an ``n x k`` matrix."""
    n, k = m.rows, m.cols
    if k > n:
        raise PreconditionError("need at least as many rows as columns")
    terms = {}
    for rows in subsets(n, k):
        d = _bareiss_det([list(m.data[r - 1]) for r in rows])
        terms[mask_of(rows)] = d.norm()
    return MultiaffinePoly(n, terms)


def permanent(rows: list[list]) -> mpq:
    """Permanent by dynamic programming over column subsets."""
    k = len(rows)
    dp = {0: mpq(1)}
    for r in range(k):
        nxt: dict[int, mpq] = {}
        for mask, v in dp.items():
            for c in range(k):
                if not mask & (1 << c) and rows[r][c]:
                    key = mask | (1 << c)
                    nxt[key] = nxt.get(key, mpq(0)) + v * rows[r][c]
        dp = nxt
    return dp.get((1 << k) - 1, mpq(0))


def permanent_poly(m: RationalMatrix) -> MultiaffinePoly:
    """``sum_I per(M[I]) x^I`` for an entrywise nonnegative ``n x k`` matrix (k <= 8)."""
    n, k = m.rows, m.cols
    if not m.is_real() or any(x.re < 0 for row in m.data for x in row):
        raise DomainError("permanent polynomial needs a nonnegative real matrix")
    if k > 8:
        raise PreconditionError("permanent expansion capped at k = 8")
    if k > n:
        raise PreconditionError("need at least as many rows as columns")
    terms = {}
    for rows in subsets(n, k):
        terms[mask_of(rows)] = permanent([[m.data[r - 1][c].re for c in range(k)] for r in rows])
    return MultiaffinePoly(n, terms)


__all__ = [
    "Status", "StabilityVerdict", "OracleInapplicable", "RayleighWitness", "ZeroWitness",
    "PhaseWitness", "rayleigh_difference", "gram_matrix", "exact_stability_deg2",
    "inequality_4vars", "grassmann_stability_oracle", "falsify_stability", "decide_stability",
    "check_rayleigh", "rayleigh_value", "NoViolationFound", "RayleighViolation",
    "elementary_symmetric", "sq_minor_poly", "permanent_poly", "permanent",
    "is_zero_witness_valid", "residual_bound",
]
