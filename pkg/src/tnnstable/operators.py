"""Linear operators on multiaffine polynomials.

An operator is stored by the images of the monomial basis ``x^S``.  The matrix
action ``A_#`` sends ``x^I`` to ``sum_J minor(A, J, I) x^J``; it is built two
ways, from compound matrices and letter by letter from a generator word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .config import check_cap
from .errors import DimensionError, DomainError
from .gaussian import ONE, ZERO, GaussianRational, rational
from .linalg import (
    TNN_MAX_N,
    GeneratorWord,
    Letter,
    RationalMatrix,
    is_totally_nonnegative,
    matrix_exp,
    minor_table,
    rank,
)
from .poly import MAX_VARS, MultiaffinePoly, indices_of, lex_key, mask_of
from .grassmann import symbol_in_dual_order
from .stability import Status, decide_stability, grassmann_stability_oracle, oracle_applicable

SYMBOL_MAX_N = 8


class MultiaffineOperator:
    """Linear endomorphism of the multiaffine polynomials in ``n`` variables."""

    __slots__ = ("n", "images")

    def __init__(self, n: int, images: Mapping[int, MultiaffinePoly] | None = None):
        if not 1 <= n <= MAX_VARS:
            raise DimensionError(f"variable count must be in 1..{MAX_VARS}")
        clean = {}
        for s, img in (images or {}).items():
            if not 0 <= s < (1 << n):
                raise DimensionError(f"basis mask {s} out of range")
            if img.n != n:
                raise DimensionError("image has the wrong variable count")
            if img:
                clean[s] = img
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "images", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultiaffineOperator is immutable")

    @classmethod
    def identity(cls, n: int) -> MultiaffineOperator:
        return cls(n, {s: MultiaffinePoly._trusted(n, {s: ONE}) for s in range(1 << n)})

    @classmethod
    def zero(cls, n: int) -> MultiaffineOperator:
        return cls(n)

    def image(self, s: int | Iterable[int]) -> MultiaffinePoly:
        s = s if isinstance(s, int) else mask_of(s)
        return self.images.get(s, MultiaffinePoly._trusted(self.n, {}))

    def apply(self, f: MultiaffinePoly) -> MultiaffinePoly:
        if f.n != self.n:
            raise DimensionError(f"operator on {self.n} variables applied to {f.n}")
        out: dict[int, GaussianRational] = {}
        for s, c in f.terms.items():
            img = self.images.get(s)
            if img is None:
                continue
            for m, v in img.terms.items():
                out[m] = out.get(m, ZERO) + c * v
        return MultiaffinePoly._trusted(self.n, {m: v for m, v in out.items() if v})

    __call__ = apply

    def compose(self, other: MultiaffineOperator) -> MultiaffineOperator:
        """``self o other`` (apply ``other`` first)."""
        if other.n != self.n:
            raise DimensionError("operators act on different variable counts")
        return MultiaffineOperator(self.n, {s: self.apply(img) for s, img in other.images.items()})

    def __matmul__(self, other):
        if not isinstance(other, MultiaffineOperator):
            return NotImplemented
        return self.compose(other)

    def __add__(self, other: MultiaffineOperator) -> MultiaffineOperator:
        if other.n != self.n:
            raise DimensionError("operators act on different variable counts")
        zero = MultiaffinePoly._trusted(self.n, {})
        keys = set(self.images) | set(other.images)
        return MultiaffineOperator(
            self.n, {s: self.images.get(s, zero) + other.images.get(s, zero) for s in keys}
        )

    def __eq__(self, other):
        if not isinstance(other, MultiaffineOperator):
            return NotImplemented
        return self.n == other.n and self.images == other.images

    def __hash__(self):
        return hash((self.n, frozenset(self.images.items())))

    def to_dense(self) -> np.ndarray:
        """Complex ``2^n x 2^n`` matrix; column ``S`` holds the coefficients of ``phi(x^S)``."""
        size = 1 << self.n
        out = np.zeros((size, size), dtype=complex)
        for s, img in self.images.items():
            for m, c in img.terms.items():
                out[m, s] = complex(c)
        return out

    def rank(self) -> int:
        """Exact rank over the Gaussian rationals."""
        if not self.images:
            return 0
        cols = sorted({m for img in self.images.values() for m in img.terms})
        rows = [[img.terms.get(m, ZERO) for m in cols] for img in self.images.values()]
        return rank(rows)

    def __repr__(self):
        return f"MultiaffineOperator(n={self.n}, images={len(self.images)})"


# -- the matrix action ---------------------------------------------------------------------

def sharp_of_matrix(a: RationalMatrix) -> MultiaffineOperator:
    """``A_#``: the degree-k block is the k-th compound matrix; constants are fixed."""
    if not a.is_square():
        raise DimensionError("A_# needs a square matrix")
    n = a.rows
    levels = minor_table(a)
    images = {0: MultiaffinePoly._trusted(n, {0: ONE})}
    for k in range(1, n + 1):
        table = levels[k]
        rmasks = [mask_of(r) for r in combinations(range(1, n + 1), k)]
        for cols in combinations(range(1, n + 1), k):
            cm = mask_of(cols)
            terms = {}
            for rm in rmasks:
                v = table[(rm, cm)]
                if v:
                    terms[rm] = v
            images[cm] = MultiaffinePoly._trusted(n, terms)
    return MultiaffineOperator(n, images)


def _block_coefficients(letter: Letter) -> tuple:
    """``(a, b, c, d)`` of the 2 x 2 block ``[[a, c], [b, d]]`` at rows ``i, i+1``."""
    t = GaussianRational.coerce(letter.t)
    if letter.kind == "E":
        return ONE, ZERO, t, ONE
    return ONE, t, ZERO, ONE


def apply_letter(letter: Letter, f: MultiaffinePoly) -> MultiaffinePoly:
    """Image of ``f`` under a single generator, by the four-case rule on ``x_i, x_{i+1}``."""
    out: dict[int, GaussianRational] = {}

    def put(m, v):
        if v:
            out[m] = out.get(m, ZERO) + v

    if letter.kind == "D":
        bit = 1 << (letter.i - 1)
        t = GaussianRational.coerce(letter.t)
        return MultiaffinePoly._trusted(
            f.n, {m: (c * t if m & bit else c) for m, c in f.terms.items()}
        )
    a, b, c, d = _block_coefficients(letter)
    p, q = 1 << (letter.i - 1), 1 << letter.i
    det = a * d - b * c
    for m, v in f.terms.items():
        rest = m & ~(p | q)
        if m & p and m & q:
            put(m, v * det)
        elif m & p:
            put(rest | p, v * a)
            put(rest | q, v * b)
        elif m & q:
            put(rest | p, v * c)
            put(rest | q, v * d)
        else:
            put(m, v)
    return MultiaffinePoly._trusted(f.n, {m: v for m, v in out.items() if v})


def sharp_via_generators(word: GeneratorWord) -> MultiaffineOperator:
    """``(L_1 L_2 ... L_m)_# = L_1# ... L_m#``, composed letter by letter."""
    n = word.n
    images = {}
    for s in range(1 << n):
        f = MultiaffinePoly._trusted(n, {s: ONE})
        for letter in reversed(word.letters):
            f = apply_letter(letter, f)
        images[s] = f
    return MultiaffineOperator(n, images)


# -- symbols and preservers -------------------------------------------------------------------

def symbol(phi: MultiaffineOperator) -> MultiaffinePoly:
    """``phi(prod (x_i + y_i))`` with ``x_i`` in slot ``i`` and ``y_i`` in slot ``n + i``."""
    n = phi.n
    check_cap(n, SYMBOL_MAX_N, "symbol")
    full = (1 << n) - 1
    terms: dict[int, GaussianRational] = {}
    for s, img in phi.images.items():
        ymask = (full ^ s) << n
        for m, c in img.terms.items():
            terms[m | ymask] = c
    return MultiaffinePoly(2 * n, terms)


class PreserverStatus(str, Enum):
    TRUE_PRESERVER = "TruePreserver"
    RANK_ONE_PRESERVER = "RankOnePreserver"
    NOT_PRESERVER = "NotPreserver"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class PreserverVerdict:
    status: PreserverStatus
    rank: int | None = None
    witness: object = None
    via: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.status in (PreserverStatus.TRUE_PRESERVER, PreserverStatus.RANK_ONE_PRESERVER)


def test_stability_preserver(phi: MultiaffineOperator, samples: int = 10_000,
                             seed: int = 0) -> PreserverVerdict:
    """Classify ``phi`` by rank, then decide stability of its image or of its symbol."""
    check_cap(phi.n, SYMBOL_MAX_N, "preserver test")
    r = phi.rank()
    if r == 0:
        return PreserverVerdict(PreserverStatus.RANK_ONE_PRESERVER, 0, None, ("zero-map",))
    if r == 1:
        g = next(img for _, img in sorted(phi.images.items(), key=lambda kv: lex_key(kv[0])))
        target, good = g, PreserverStatus.RANK_ONE_PRESERVER
    else:
        target, good = symbol(phi), PreserverStatus.TRUE_PRESERVER
        # The symbol is a Grassmann point only in dual-embedding order; stability
        # does not see the relabeling, so a positive oracle answer carries over.
        relabeled = symbol_in_dual_order(target)
        if relabeled.is_homogeneous() and oracle_applicable(relabeled):
            res = grassmann_stability_oracle(relabeled)
            if getattr(res, "status", None) is Status.STABLE_ORACLE:
                return PreserverVerdict(good, r, res.witness, ("dual-order",) + res.certificate)
    v = decide_stability(target, "auto", samples, seed)
    if v.status is Status.NOT_STABLE:
        return PreserverVerdict(PreserverStatus.NOT_PRESERVER, r, v.witness, v.certificate)
    if v.status is Status.NO_COUNTEREXAMPLE:
        return PreserverVerdict(PreserverStatus.UNDETERMINED, r, None, v.certificate)
    return PreserverVerdict(good, r, v.witness, v.certificate)


# Not a pytest test despite the name.
test_stability_preserver.__test__ = False


def test_sharp_preserver_exact(a: RationalMatrix) -> PreserverVerdict:
    """``A_#`` preserves stability exactly when ``A`` is totally nonnegative."""
    if not a.is_square():
        raise DimensionError("A_# needs a square matrix")
    if not a.is_real():
        raise DomainError("exact preserver test needs a real matrix")
    check_cap(a.rows, TNN_MAX_N, "exact preserver test")
    cert = is_totally_nonnegative(a)
    if cert.ok:
        return PreserverVerdict(PreserverStatus.TRUE_PRESERVER, None, None, ("tnn-minors",))
    return PreserverVerdict(PreserverStatus.NOT_PRESERVER, None, cert, ("tnn-minors",))


test_sharp_preserver_exact.__test__ = False


def extend(phi: MultiaffineOperator, m: int) -> MultiaffineOperator:
    """Extension that is linear over ``C[z_1..z_m]``; ``z_j`` is variable ``n + j``."""
    n = phi.n
    if m < 0 or n + m > MAX_VARS:
        raise DimensionError(f"extension to {n + m} variables exceeds the cap {MAX_VARS}")
    total = n + m
    images = {}
    for s, img in phi.images.items():
        for t in range(1 << m):
            shift = t << n
            images[s | shift] = MultiaffinePoly._trusted(
                total, {mm | shift: c for mm, c in img.terms.items()}
            )
    return MultiaffineOperator(total, images)


# -- delta_Z ------------------------------------------------------------------------------------

def delta_Z(z: RationalMatrix) -> MultiaffineOperator:
    """``x^J -> (sum_{j in J} Z_jj) x^J + sum_{j in J, i not in J} Z_ij x^{J - j + i}``."""
    if not z.is_square():
        raise DimensionError("delta_Z needs a square matrix")
    if not z.is_real():
        raise DomainError("delta_Z needs real entries")
    n = z.rows
    images = {}
    for jm in range(1, 1 << n):
        terms: dict[int, GaussianRational] = {}
        J = indices_of(jm)
        diag = ZERO
        for j in J:
            diag = diag + z.data[j - 1][j - 1]
        if diag:
            terms[jm] = diag
        for j in J:
            for i in range(1, n + 1):
                if jm & (1 << (i - 1)):
                    continue
                v = z.data[i - 1][j - 1]
                if v:
                    key = (jm ^ (1 << (j - 1))) | (1 << (i - 1))
                    terms[key] = terms.get(key, ZERO) + v
        images[jm] = MultiaffinePoly(n, terms)
    return MultiaffineOperator(n, images)


def exp_t_delta(z: RationalMatrix, t: float, tol: float = 1e-12) -> np.ndarray:
    """Dense float matrix of ``exp(t delta_Z)`` (scaling and squaring)."""
    check_cap(z.rows, SYMBOL_MAX_N, "exp_t_delta")
    d = delta_Z(z).to_dense().real
    terms = 12
    while 0.5 ** (terms + 1) / math.factorial(terms + 1) > tol * 1e-3 and terms < 60:
        terms += 1
    return matrix_exp(d, t, terms)


def sharp_dense(a: np.ndarray) -> np.ndarray:
    """Float ``2^n x 2^n`` matrix of ``A_#`` with entries from ``numpy.linalg.det``."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    size = 1 << n
    out = np.zeros((size, size))
    out[0, 0] = 1.0
    for k in range(1, n + 1):
        for rs in combinations(range(n), k):
            rm = sum(1 << r for r in rs)
            sub = a[list(rs)]
            for cs in combinations(range(n), k):
                cm = sum(1 << c for c in cs)
                out[rm, cm] = np.linalg.det(sub[:, list(cs)])
    return out


def poly_from_vector(n: int, vec: np.ndarray) -> MultiaffinePoly:
    """Polynomial with exactly the (float) coefficients of ``vec``; zeros are dropped."""
    terms = {}
    for m, v in enumerate(vec):
        v = complex(v)
        if v != 0:
            terms[m] = GaussianRational(rational(v.real), rational(v.imag))
    return MultiaffinePoly(n, terms)


def poly_to_vector(f: MultiaffinePoly) -> np.ndarray:
    vec = np.zeros(1 << f.n, dtype=complex)
    for m, c in f.terms.items():
        vec[m] = complex(c)
    return vec


def apply_dense(mat: np.ndarray, f: MultiaffinePoly) -> MultiaffinePoly:
    """Apply a float operator matrix; the result carries no exactness guarantee."""
    vec = mat @ poly_to_vector(f)
    if np.all(np.abs(vec.imag) == 0):
        vec = vec.real
    return poly_from_vector(f.n, vec)
