"""Plücker coordinates, exchange relations and the totally nonnegative Grassmannian."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DimensionError, NotAPointError, PreconditionError, SingularMatrixError
from .gaussian import ONE, ZERO, GaussianRational
from .linalg import RationalMatrix, _bareiss_det, compound_matrix, dual_matrix
from .poly import MultiaffinePoly, NotSamePhase, indices_of, mask_of, phase_normalize, subsets


@dataclass(frozen=True)
class PluckerVector:
    """Homogeneous coordinates of a point of Gr(k, n), indexed by lex-ordered k-subsets."""

    n: int
    k: int
    coords: tuple[GaussianRational, ...]

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise DimensionError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        coords = tuple(GaussianRational.coerce(c) for c in self.coords)
        if len(coords) != len(subsets(self.n, self.k)):
            raise DimensionError(f"Gr({self.k},{self.n}) needs {len(subsets(self.n, self.k))} coordinates")
        if not any(coords):
            raise PreconditionError("all Plücker coordinates are zero")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_mapping(cls, n: int, k: int, values: dict) -> PluckerVector:
        """Coordinates given as ``{(1, 2): c, ...}``; missing subsets are zero."""
        index = {s: pos for pos, s in enumerate(subsets(n, k))}
        coords = [ZERO] * len(index)
        for s, c in values.items():
            key = tuple(sorted(s))
            if key not in index:
                raise DimensionError(f"{s} is not a {k}-subset of [{n}]")
            coords[index[key]] = GaussianRational.coerce(c)
        return cls(n, k, tuple(coords))

    @property
    def sets(self) -> list[tuple[int, ...]]:
        return subsets(self.n, self.k)

    def as_dict(self) -> dict[tuple[int, ...], GaussianRational]:
        return dict(zip(self.sets, self.coords))

    def __getitem__(self, s: Iterable[int]) -> GaussianRational:
        return signed_coordinate(self._lookup(), s)

    def _lookup(self) -> dict[int, GaussianRational]:
        return {mask_of(s): c for s, c in zip(self.sets, self.coords)}

    def scale(self, c) -> PluckerVector:
        c = GaussianRational.coerce(c)
        return PluckerVector(self.n, self.k, tuple(x * c for x in self.coords))


@dataclass(frozen=True)
class GrassmannianPoint:
    plucker: PluckerVector
    relations_verified: bool = False
    matrix: RationalMatrix | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.plucker.n

    @property
    def k(self) -> int:
        return self.plucker.k


def signed_coordinate(lookup: dict[int, GaussianRational], seq: Sequence[int]) -> GaussianRational:
    """Coordinate of an index sequence: sign of the sorting permutation, 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return ZERO
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    value = lookup.get(mask_of(seq), ZERO)
    return -value if inversions % 2 else value


def plucker_of_matrix(m: RationalMatrix) -> PluckerVector:
    """Maximal minors of an ``n x k`` matrix of rank ``k``."""
    n, k = m.rows, m.cols
    if k > n:
        raise NotAPointError(f"{n}x{k} matrix cannot have rank {k}")
    if m.rank() != k:
        raise NotAPointError("matrix is rank deficient")
    coords = tuple(
        _bareiss_det([list(m.data[r - 1]) for r in rows]) for rows in subsets(n, k)
    )
    return PluckerVector(n, k, coords)


# -- relations -----------------------------------------------------------------------

@dataclass(frozen=True)
class RelationsOK:
    ok = True
    kind = "OK"


@dataclass(frozen=True)
class Violated:
    """The exchange relation for ``(I, J)`` evaluates to ``value``."""

    I: tuple[int, ...]
    J: tuple[int, ...]
    value: GaussianRational
    ok = False
    kind = "Violated"


def exchange_relation(lookup: dict[int, GaussianRational], I: Sequence[int], J: Sequence[int]) -> GaussianRational:
    """``sum_l (-1)^l p(I + j_l) p(J - j_l)`` for a (k-1)-set ``I`` and (k+1)-set ``J``."""
    total = ZERO
    I = list(I)
    for l, j in enumerate(J):
        a = signed_coordinate(lookup, I + [j])
        if not a:
            continue
        b = lookup.get(mask_of(J) ^ (1 << (j - 1)), ZERO)
        if not b:
            continue
        total = total + a * b if l % 2 == 0 else total - a * b
    return total


def check_plucker_relations(p: PluckerVector) -> RelationsOK | Violated:
    """Check every one-element exchange relation exactly; report the first failure."""
    n, k = p.n, p.k
    if k == 0 or k == n:
        return RelationsOK()
    lookup = p._lookup()
    for I in combinations(range(1, n + 1), k - 1):
        for J in combinations(range(1, n + 1), k + 1):
            v = exchange_relation(lookup, I, J)
            if v:
                return Violated(I, J, v)
    return RelationsOK()


# -- polynomials --------------------------------------------------------------------------

def representing_polynomial(p: PluckerVector) -> MultiaffinePoly:
    return MultiaffinePoly(p.n, {mask_of(s): c for s, c in zip(p.sets, p.coords)})


@dataclass(frozen=True)
class NotGrassmannian:
    violation: Violated
    ok = False
    kind = "NotGrassmannian"


def polynomial_to_plucker(f: MultiaffinePoly) -> GrassmannianPoint | NotGrassmannian:
    """Read a homogeneous polynomial as Plücker coordinates and test the relations."""
    if f.is_zero():
        raise PreconditionError("zero polynomial represents no point")
    if not f.is_homogeneous():
        raise PreconditionError("polynomial is not homogeneous")
    k = f.degree()
    p = PluckerVector.from_mapping(f.n, k, {indices_of(m): c for m, c in f.terms.items()})
    cert = check_plucker_relations(p)
    if not cert.ok:
        return NotGrassmannian(cert)
    return GrassmannianPoint(p, relations_verified=True)


@dataclass(frozen=True)
class TNNPoint:
    """Relations hold and the coordinates are nonnegative after dividing by ``phase``."""

    normalized: tuple
    phase: GaussianRational
    ok = True
    kind = "TNNPoint"


@dataclass(frozen=True)
class NotTNN:
    witness: NotSamePhase
    ok = False
    kind = "NotTNN"


def is_tnn_point(p: PluckerVector | GrassmannianPoint) -> TNNPoint | NotTNN | NotGrassmannian:
    if isinstance(p, GrassmannianPoint):
        p = p.plucker
    cert = check_plucker_relations(p)
    if not cert.ok:
        return NotGrassmannian(cert)
    res = phase_normalize(representing_polynomial(p))
    if not res.ok:
        return NotTNN(res)
    normalized = tuple((c / res.witness).re for c in p.coords)
    return TNNPoint(normalized, res.witness)


def positroid_support(p: PluckerVector) -> set[tuple[int, ...]]:
    return {s for s, c in zip(p.sets, p.coords) if c}


def basis_indicator_polynomial(bases: Iterable[Sequence[int]], n: int | None = None) -> MultiaffinePoly:
    """``sum_{I in bases} x^I`` with unit coefficients."""
    bases = [tuple(sorted(b)) for b in bases]
    if not bases:
        raise PreconditionError("empty basis family")
    if n is None:
        n = max(max(b, default=1) for b in bases)
    return MultiaffinePoly(n, {mask_of(b): ONE for b in bases})


# -- group action ---------------------------------------------------------------------------

def standard_point_matrix(n: int, k: int) -> RationalMatrix:
    """``M0 = (I_k; 0)``, whose column space is the base point ``V0``."""
    return RationalMatrix._trusted(
        [[ONE if r == c else ZERO for c in range(k)] for r in range(n)]
    )


def _require_invertible(a: RationalMatrix) -> None:
    if not a.is_square():
        raise DimensionError("acting matrix must be square")
    if not a.det():
        raise SingularMatrixError("acting matrix is singular")


def act_on_matrix(a: RationalMatrix, m: RationalMatrix) -> GrassmannianPoint:
    """Column space of ``a @ m`` (minors of the product)."""
    _require_invertible(a)
    if a.cols != m.rows:
        raise DimensionError("matrix sizes do not match")
    am = a @ m
    return GrassmannianPoint(plucker_of_matrix(am), relations_verified=False, matrix=am)


def act_on_plucker(a: RationalMatrix, p: PluckerVector) -> PluckerVector:
    """``compound(a, k)`` applied to the coordinate vector (Cauchy-Binet route)."""
    _require_invertible(a)
    if a.rows != p.n:
        raise DimensionError("matrix size does not match the Grassmannian")
    c = compound_matrix(a, p.k)
    coords = []
    for row in c.data:
        s = ZERO
        for x, y in zip(row, p.coords):
            if x and y:
                s = s + x * y
        coords.append(s)
    return PluckerVector(p.n, p.k, tuple(coords))


def act(a: RationalMatrix, v) -> GrassmannianPoint:
    """Translate ``v`` by ``a``; ``v`` may be a representing matrix, point or Plücker vector."""
    if isinstance(v, RationalMatrix):
        return act_on_matrix(a, v)
    if isinstance(v, GrassmannianPoint):
        if v.matrix is not None:
            return act_on_matrix(a, v.matrix)
        v = v.plucker
    return GrassmannianPoint(act_on_plucker(a, v), relations_verified=False)


def dual_embedding_matrix(a: RationalMatrix) -> RationalMatrix:
    n = a.rows
    return RationalMatrix.identity(n).vstack(dual_matrix(a))


def dual_embedding(a: RationalMatrix) -> GrassmannianPoint:
    """Column space of ``(I_n; dual(a))`` in Gr(n, 2n)."""
    if not a.is_square():
        raise DimensionError("dual embedding needs a square matrix")
    m = dual_embedding_matrix(a)
    return GrassmannianPoint(plucker_of_matrix(m), relations_verified=False, matrix=m)


def dual_variable_slots(n: int) -> list[int]:
    """Row ``r`` of the dual embedding corresponds to symbol slot ``slots[r-1]``.

    Rows are ordered ``y1 < ... < yn < xn < ... < x1``; symbol slots put ``x_i``
    at ``i`` and ``y_i`` at ``n + i``.
    """
    return [n + r for r in range(1, n + 1)] + [n + 1 - r for r in range(1, n + 1)]


def dual_point_polynomial(a: RationalMatrix) -> MultiaffinePoly:
    """Representing polynomial of the dual embedding, rewritten in symbol variables."""
    n = a.rows
    rep = representing_polynomial(dual_embedding(a).plucker)
    return rep.embed(2 * n, dual_variable_slots(n))


def symbol_in_dual_order(h: MultiaffinePoly) -> MultiaffinePoly:
    """Relabel a symbol (``x_i`` at ``i``, ``y_i`` at ``n + i``) into dual-embedding row order."""
    n = h.n // 2
    inverse = [0] * (2 * n)
    for row, slot in enumerate(dual_variable_slots(n), start=1):
        inverse[slot - 1] = row
    return h.embed(2 * n, inverse)
