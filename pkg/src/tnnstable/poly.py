"""Sparse polynomials over the Gaussian rationals.

Two representations are provided:

* :class:`MultiaffinePoly` -- degree at most one in every variable; a monomial
  is a bitmask with bit ``i-1`` set when ``x_i`` divides it.
* :class:`SparsePoly` -- general exponents, capped at :data:`MAX_EXPONENT` per
  variable, used for derived quantities such as Rayleigh differences.

Variables are numbered from 1 in the public API.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import DimensionError, DomainError, PreconditionError, UnsupportedDegreeError
from .gaussian import ONE, ZERO, GaussianRational

MAX_VARS = 16
MAX_EXPONENT = 4


# -- variable sets ----------------------------------------------------------

def mask_of(indices: Iterable[int]) -> int:
    """Bitmask of a collection of 1-based variable indices."""
    mask = 0
    for i in indices:
        if i < 1:
            raise ValueError(f"variable indices are 1-based, got {i}")
        mask |= 1 << (i - 1)
    return mask


def indices_of(mask: int) -> tuple[int, ...]:
    """Sorted 1-based indices of the bits set in ``mask``."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def subsets(n: int, k: int) -> list[tuple[int, ...]]:
    """All k-subsets of ``[n]`` in lexicographic order, as 1-based tuples."""
    return list(combinations(range(1, n + 1), k))


def lex_key(mask: int) -> tuple[int, ...]:
    return indices_of(mask)


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 1 or n > MAX_VARS:
        raise DimensionError(f"variable count must be in 1..{MAX_VARS}, got {n!r}")


# -- multiaffine polynomials -------------------------------------------------

class MultiaffinePoly:
    """Immutable multiaffine polynomial in ``n`` variables."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[int, object] | None = None):
        _check_n(n)
        clean: dict[int, GaussianRational] = {}
        limit = 1 << n
        for mask, coeff in (terms or {}).items():
            if not 0 <= mask < limit:
                raise DimensionError(f"monomial mask {mask} out of range for n={n}")
            c = GaussianRational.coerce(coeff)
            if c:
                clean[mask] = c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _trusted(cls, n: int, terms: dict) -> MultiaffinePoly:
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("MultiaffinePoly is immutable")

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> MultiaffinePoly:
        return cls(n)

    @classmethod
    def constant(cls, n: int, c=1) -> MultiaffinePoly:
        return cls(n, {0: c})

    @classmethod
    def monomial(cls, n: int, indices: Iterable[int], coeff=1) -> MultiaffinePoly:
        return cls(n, {mask_of(indices): coeff})

    @classmethod
    def variable(cls, n: int, i: int) -> MultiaffinePoly:
        return cls.monomial(n, (i,))

    @classmethod
    def from_sets(cls, n: int, items: Mapping[Sequence[int], object]) -> MultiaffinePoly:
        """Build from ``{(1, 2): c, (3,): d, (): e}``; repeated keys are rejected."""
        terms: dict[int, object] = {}
        for idx, c in items.items():
            if len(set(idx)) != len(idx):
                raise DomainError(f"repeated variable in {idx!r}: not multiaffine")
            mask = mask_of(idx)
            if mask in terms:
                raise DomainError(f"duplicate monomial {tuple(sorted(idx))}")
            terms[mask] = c
        return cls(n, terms)

    # structure ------------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, indices: Iterable[int] | int) -> GaussianRational:
        mask = indices if isinstance(indices, int) else mask_of(indices)
        return self.terms.get(mask, ZERO)

    def sorted_terms(self) -> list[tuple[int, GaussianRational]]:
        """Terms in lexicographic order of their index tuples."""
        return sorted(self.terms.items(), key=lambda kv: lex_key(kv[0]))

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((popcount(m) for m in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((popcount(m) for m in self.terms), default=-1)

    def degrees(self) -> set[int]:
        return {popcount(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def is_real(self) -> bool:
        return all(c.is_real for c in self.terms.values())

    def support(self) -> list[tuple[int, ...]]:
        return [indices_of(m) for m, _ in self.sorted_terms()]

    # arithmetic -----------------------------------------------------------

    def _check_same(self, other: MultiaffinePoly) -> None:
        if self.n != other.n:
            raise DimensionError(f"variable counts differ: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, MultiaffinePoly):
            return NotImplemented
        self._check_same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return MultiaffinePoly._trusted(self.n, out)

    def __neg__(self):
        return MultiaffinePoly._trusted(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiaffinePoly):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> MultiaffinePoly:
        c = GaussianRational.coerce(c)
        if not c:
            return MultiaffinePoly._trusted(self.n, {})
        return MultiaffinePoly._trusted(self.n, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, MultiaffinePoly):
            self._check_same(other)
            out: dict[int, GaussianRational] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    if m1 & m2:
                        raise DomainError("product is not multiaffine (shared variable)")
                    m = m1 | m2
                    out[m] = out.get(m, ZERO) + c1 * c2
            return MultiaffinePoly._trusted(self.n, {m: c for m, c in out.items() if c})
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, MultiaffinePoly):
            return NotImplemented
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __truediv__(self, c):
        c = GaussianRational.coerce(c)
        return MultiaffinePoly._trusted(self.n, {m: v / c for m, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, MultiaffinePoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.n, frozenset(self.terms.items()))))
        return self._hash

    def conjugate(self) -> MultiaffinePoly:
        return MultiaffinePoly._trusted(self.n, {m: c.conjugate() for m, c in self.terms.items()})

    def partial(self, i: int) -> MultiaffinePoly:
        """Partial derivative with respect to ``x_i``."""
        if not 1 <= i <= self.n:
            raise DimensionError(f"variable index {i} out of range 1..{self.n}")
        bit = 1 << (i - 1)
        return MultiaffinePoly._trusted(
            self.n, {m ^ bit: c for m, c in self.terms.items() if m & bit}
        )

    def embed(self, n: int, slots: Sequence[int] | None = None) -> MultiaffinePoly:
        """Re-express in ``n`` variables; variable ``i`` goes to ``slots[i-1]`` (default ``i``)."""
        if slots is None:
            if n < self.n:
                raise DimensionError("cannot embed into fewer variables")
            slots = range(1, self.n + 1)
        slots = list(slots)
        if len(slots) != self.n or len(set(slots)) != self.n:
            raise DimensionError("slot map must be injective with one entry per variable")
        out = {}
        for m, c in self.terms.items():
            out[mask_of(slots[i - 1] for i in indices_of(m))] = c
        return MultiaffinePoly(n, out)

    # evaluation -----------------------------------------------------------

    def evaluate(self, point: Sequence[complex]) -> complex:
        """Floating-point value at ``point`` (direct sum of monomials)."""
        if len(point) != self.n:
            raise DimensionError(f"point has length {len(point)}, expected {self.n}")
        pt = [complex(z) for z in point]
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            i = 0
            while m:
                if m & 1:
                    v *= pt[i]
                m >>= 1
                i += 1
            total += v
        return total

    def evaluate_exact(self, point: Sequence) -> GaussianRational:
        if len(point) != self.n:
            raise DimensionError(f"point has length {len(point)}, expected {self.n}")
        pt = [GaussianRational.coerce(z) for z in point]
        total = ZERO
        for m, c in self.terms.items():
            v = c
            for i in indices_of(m):
                v = v * pt[i - 1]
            total = total + v
        return total

    def degree_slice(self, k: int) -> MultiaffinePoly:
        return MultiaffinePoly._trusted(
            self.n, {m: c for m, c in self.terms.items() if popcount(m) == k}
        )

    def to_sparse(self) -> SparsePoly:
        return SparsePoly._trusted(
            self.n,
            {tuple((m >> i) & 1 for i in range(self.n)): c for m, c in self.terms.items()},
        )

    def __repr__(self):
        return f"MultiaffinePoly({self.n}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(f"x{i}" for i in indices_of(m))
            if not mono:
                parts.append(str(c))
            elif c == ONE:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)


# -- general sparse polynomials ----------------------------------------------

class SparsePoly:
    """Immutable sparse polynomial with per-variable exponents at most :data:`MAX_EXPONENT`."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Sequence[int], object] | None = None):
        _check_n(n)
        clean: dict[tuple[int, ...], GaussianRational] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise DimensionError(f"exponent vector {exps} has length != {n}")
            if any(e < 0 for e in exps):
                raise DomainError("negative exponent")
            if any(e > MAX_EXPONENT for e in exps):
                raise UnsupportedDegreeError(f"exponent above {MAX_EXPONENT} in {exps}")
            c = GaussianRational.coerce(coeff)
            if c:
                clean[exps] = clean.get(exps, ZERO) + c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c})

    @classmethod
    def _trusted(cls, n, terms) -> SparsePoly:
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "terms", terms)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("SparsePoly is immutable")

    @classmethod
    def variable(cls, n: int, i: int) -> SparsePoly:
        e = [0] * n
        e[i - 1] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def constant(cls, n: int, c=1) -> SparsePoly:
        return cls(n, {(0,) * n: c})

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps: Sequence[int]) -> GaussianRational:
        return self.terms.get(tuple(exps), ZERO)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def _check_same(self, other: SparsePoly) -> None:
        if self.n != other.n:
            raise DimensionError(f"variable counts differ: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        self._check_same(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return SparsePoly._trusted(self.n, out)

    def __neg__(self):
        return SparsePoly._trusted(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> SparsePoly:
        c = GaussianRational.coerce(c)
        if not c:
            return SparsePoly._trusted(self.n, {})
        return SparsePoly._trusted(self.n, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check_same(other)
        out: dict[tuple[int, ...], GaussianRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if max(e, default=0) > MAX_EXPONENT:
                    raise UnsupportedDegreeError(f"product exponent {e} exceeds {MAX_EXPONENT}")
                out[e] = out.get(e, ZERO) + c1 * c2
        return SparsePoly._trusted(self.n, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def partial(self, i: int) -> SparsePoly:
        if not 1 <= i <= self.n:
            raise DimensionError(f"variable index {i} out of range 1..{self.n}")
        k = i - 1
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[ne] = c * e[k]
        return SparsePoly._trusted(self.n, out)

    def evaluate(self, point: Sequence[complex]) -> complex:
        if len(point) != self.n:
            raise DimensionError(f"point has length {len(point)}, expected {self.n}")
        pt = [complex(z) for z in point]
        total = 0j
        for e, c in self.terms.items():
            v = complex(c)
            for z, k in zip(pt, e):
                if k:
                    v *= z ** k
            total += v
        return total

    def evaluate_exact(self, point: Sequence) -> GaussianRational:
        if len(point) != self.n:
            raise DimensionError(f"point has length {len(point)}, expected {self.n}")
        pt = [GaussianRational.coerce(z) for z in point]
        total = ZERO
        for e, c in self.terms.items():
            v = c
            for z, k in zip(pt, e):
                if k:
                    v = v * z ** k
            total = total + v
        return total

    def __repr__(self):
        return f"SparsePoly({self.n}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


# -- module-level operations ---------------------------------------------------

def add(f, g):
    """Sum of two polynomials of the same kind and variable count."""
    if type(f) is not type(g):
        raise TypeError("add() needs two polynomials of the same kind")
    return f + g


def mul(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    if isinstance(f, MultiaffinePoly):
        f = f.to_sparse()
    if isinstance(g, MultiaffinePoly):
        g = g.to_sparse()
    return f * g


def partial_derivative(f, i: int):
    return f.partial(i)


def evaluate(f, point: Sequence[complex]) -> complex:
    """Float evaluation; a non-finite result signals overflow (check with ``cmath.isfinite``)."""
    return f.evaluate(point)


def degree_slice(f: MultiaffinePoly, k: int) -> MultiaffinePoly:
    return f.degree_slice(k)


def elementary_symmetric(n: int, k: int) -> MultiaffinePoly:
    """Sum of all squarefree monomials of degree ``k`` with unit coefficients."""
    if not 0 <= k <= n:
        raise PreconditionError(f"need 0 <= k <= n, got k={k}, n={n}")
    return MultiaffinePoly(n, {mask_of(s): ONE for s in subsets(n, k)})


# -- phase -----------------------------------------------------------------------

@dataclass(frozen=True)
class SamePhase:
    """All coefficients are nonnegative rational multiples of ``witness``."""

    witness: GaussianRational
    normalized: MultiaffinePoly
    ok = True


@dataclass(frozen=True)
class NotSamePhase:
    """Two monomials whose coefficients have different phases."""

    first: tuple[int, ...]
    first_coeff: GaussianRational
    second: tuple[int, ...]
    second_coeff: GaussianRational
    ok = False


def phase_normalize(f: MultiaffinePoly) -> SamePhase | NotSamePhase:
    """Divide by the lexicographically first coefficient if all coefficients share its phase."""
    if f.is_zero():
        raise PreconditionError("phase of the zero polynomial is undefined")
    items = f.sorted_terms()
    m0, c0 = items[0]
    for m, c in items[1:]:
        if not c0.same_phase(c):
            return NotSamePhase(indices_of(m0), c0, indices_of(m), c)
    return SamePhase(c0, f / c0)


def verify_phase_gap_structure(f: MultiaffinePoly, k: int) -> bool:
    """Check the sign pattern forced on a stable polynomial with an empty degree-``k`` part.

    True iff some phase ``c0`` makes every degree ``k+1`` coefficient a nonnegative
    multiple of ``c0`` and every degree ``k-1`` coefficient a nonpositive multiple.
    """
    if f.degree_slice(k):
        raise PreconditionError(f"polynomial has terms of degree {k}")
    above = [c for _, c in f.degree_slice(k + 1).sorted_terms()]
    below = [-c for _, c in f.degree_slice(k - 1).sorted_terms()] if k >= 1 else []
    coeffs = above + below
    if not coeffs:
        return True
    c0 = coeffs[0]
    return all(c0.same_phase(c) for c in coeffs[1:])
