"""Exact matrix algebra: minors, compounds, total nonnegativity, generators, PSD tests.

Matrices hold :class:`~tnnstable.gaussian.GaussianRational` entries.  Row and
column sets in the public API are 1-based index tuples; all enumerations are
by size, then lexicographic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .config import check_cap
from .errors import (
    DimensionError,
    DomainError,
    GenerationError,
    PreconditionError,
)
from .gaussian import ONE, ZERO, GaussianRational, rational
from .poly import mask_of

MAX_DIM = 16
TNN_MAX_N = 8
PSD_MAX_N = 12


class RationalMatrix:
    """Dense immutable matrix over the Gaussian rationals."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence[object]]):
        rows = [tuple(GaussianRational.coerce(x) for x in row) for row in data]
        if not rows or not rows[0]:
            raise DimensionError("matrix must have at least one row and one column")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise DimensionError("ragged matrix rows")
        if len(rows) > MAX_DIM or cols > MAX_DIM:
            raise DimensionError(f"matrix dimensions are capped at {MAX_DIM}")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", tuple(rows))

    @classmethod
    def _trusted(cls, data) -> RationalMatrix:
        obj = object.__new__(cls)
        object.__setattr__(obj, "rows", len(data))
        object.__setattr__(obj, "cols", len(data[0]))
        object.__setattr__(obj, "data", tuple(tuple(r) for r in data))
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls._trusted([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RationalMatrix:
        return cls._trusted([[ZERO] * cols for _ in range(rows)])

    @classmethod
    def from_flat(cls, rows: int, cols: int, entries: Sequence) -> RationalMatrix:
        if len(entries) != rows * cols:
            raise DimensionError("entries length must equal rows*cols")
        return cls([entries[r * cols:(r + 1) * cols] for r in range(rows)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, rc: tuple[int, int]) -> GaussianRational:
        r, c = rc
        return self.data[r][c]

    def tolist(self) -> list[list[GaussianRational]]:
        return [list(r) for r in self.data]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_real(self) -> bool:
        return all(x.is_real for row in self.data for x in row)

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.data[i][j] == self.data[j][i] for i in range(self.rows) for j in range(i)
        )

    def transpose(self) -> RationalMatrix:
        return RationalMatrix._trusted([list(col) for col in zip(*self.data)])

    @property
    def T(self) -> RationalMatrix:
        return self.transpose()

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = list(zip(*other.data))
        out = []
        for row in self.data:
            out_row = []
            for col in ocols:
                s = ZERO
                for a, b in zip(row, col):
                    if a and b:
                        s = s + a * b
                out_row.append(s)
            out.append(out_row)
        return RationalMatrix._trusted(out)

    def __add__(self, other: RationalMatrix) -> RationalMatrix:
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return RationalMatrix._trusted(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)]
        )

    def __neg__(self) -> RationalMatrix:
        return RationalMatrix._trusted([[-a for a in r] for r in self.data])

    def __sub__(self, other: RationalMatrix) -> RationalMatrix:
        return self + (-other)

    def scale(self, c) -> RationalMatrix:
        c = GaussianRational.coerce(c)
        return RationalMatrix._trusted([[a * c for a in r] for r in self.data])

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def submatrix(self, rowset: Sequence[int], colset: Sequence[int]) -> RationalMatrix:
        """Submatrix on 1-based row and column indices."""
        return RationalMatrix._trusted(
            [[self.data[r - 1][c - 1] for c in colset] for r in rowset]
        )

    def vstack(self, other: RationalMatrix) -> RationalMatrix:
        if self.cols != other.cols:
            raise DimensionError("vstack needs equal column counts")
        return RationalMatrix._trusted(list(self.data) + list(other.data))

    def to_numpy(self, dtype=float) -> np.ndarray:
        if dtype is float and not self.is_real():
            raise DomainError("matrix has complex entries")
        return np.array([[dtype(complex(x)) if dtype is complex else float(x.re)
                          for x in r] for r in self.data], dtype=dtype)

    def det(self) -> GaussianRational:
        if not self.is_square():
            raise DimensionError("determinant of a non-square matrix")
        return _bareiss_det([list(r) for r in self.data])

    def rank(self) -> int:
        return _rank([list(r) for r in self.data])

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.data)
        return f"RationalMatrix([{body}])"


def as_matrix(a) -> RationalMatrix:
    return a if isinstance(a, RationalMatrix) else RationalMatrix(a)


# -- elimination kernels --------------------------------------------------------

def _bareiss_det(m: list[list[GaussianRational]]) -> GaussianRational:
    """Fraction-free Gaussian elimination; destroys ``m``."""
    n = len(m)
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return ZERO
        pivot = m[k][k]
        row_k = m[k]
        for i in range(k + 1, n):
            row_i = m[i]
            lead = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) / prev
        prev = pivot
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def _rank(m: list[list[GaussianRational]]) -> int:
    rows, cols = len(m), len(m[0])
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        for r in range(rank + 1, rows):
            if m[r][c]:
                f = m[r][c] / p
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def rank(rows: Sequence[Sequence[GaussianRational]]) -> int:
    """Exact rank of a list-of-rows matrix over Q(i)."""
    if not rows:
        return 0
    return _rank([[GaussianRational.coerce(x) for x in r] for r in rows])


# -- minors ----------------------------------------------------------------------

def minor(a: RationalMatrix, rowset: Iterable[int], colset: Iterable[int]) -> GaussianRational:
    """Determinant of the submatrix on 1-based ``rowset`` x ``colset`` (Bareiss)."""
    rowset, colset = tuple(rowset), tuple(colset)
    if len(rowset) != len(colset) or not rowset:
        raise DimensionError("minor needs equal, nonzero row and column counts")
    if len(set(rowset)) != len(rowset) or len(set(colset)) != len(colset):
        raise DimensionError("repeated index in minor")
    if min(rowset) < 1 or max(rowset) > a.rows or min(colset) < 1 or max(colset) > a.cols:
        raise DimensionError("minor index out of bounds")
    return _bareiss_det([[a.data[r - 1][c - 1] for c in colset] for r in rowset])


def minor_table(a: RationalMatrix, max_k: int | None = None) -> list[dict]:
    """All minors up to size ``max_k`` by Laplace expansion along the first row.

    Returns ``levels`` where ``levels[k][(rowmask, colmask)]`` is the k x k minor
    (masks use bit ``i-1`` for index ``i``).  ``levels[0]`` holds the empty minor 1.
    This route is independent of the Bareiss kernel used by :func:`minor`.
    """
    top = min(a.rows, a.cols)
    max_k = top if max_k is None else min(max_k, top)
    levels: list[dict] = [{(0, 0): ONE}]
    if max_k >= 1:
        levels.append({(1 << r, 1 << c): a.data[r][c]
                       for r in range(a.rows) for c in range(a.cols)})
    for k in range(2, max_k + 1):
        prev = levels[k - 1]
        cur = {}
        for rows in combinations(range(a.rows), k):
            r0 = rows[0]
            rest = 0
            for r in rows[1:]:
                rest |= 1 << r
            rmask = rest | (1 << r0)
            arow = a.data[r0]
            for cols in combinations(range(a.cols), k):
                cmask = 0
                for c in cols:
                    cmask |= 1 << c
                s = ZERO
                for t, c in enumerate(cols):
                    x = arow[c]
                    if not x:
                        continue
                    sub = prev[(rest, cmask ^ (1 << c))]
                    if not sub:
                        continue
                    s = s + x * sub if t % 2 == 0 else s - x * sub
                cur[(rmask, cmask)] = s
        levels.append(cur)
    return levels


def _iter_minors(a: RationalMatrix, levels: list[dict]):
    """Yield ``(rowset, colset, value)`` by size, then lex rows, then lex cols."""
    for k in range(1, len(levels)):
        table = levels[k]
        rsets = list(combinations(range(1, a.rows + 1), k))
        csets = list(combinations(range(1, a.cols + 1), k))
        cmasks = [mask_of(c) for c in csets]
        for rs in rsets:
            rm = mask_of(rs)
            for cs, cm in zip(csets, cmasks):
                yield rs, cs, table[(rm, cm)]


@dataclass(frozen=True)
class TNN:
    """Every minor is nonnegative."""

    ok = True
    kind = "TNN"


@dataclass(frozen=True)
class NegativeMinor:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    value: GaussianRational
    ok = False
    kind = "NegativeMinor"


@dataclass(frozen=True)
class TP:
    """Every minor is strictly positive."""

    ok = True
    kind = "TP"


@dataclass(frozen=True)
class NonpositiveMinor:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    value: GaussianRational
    ok = False
    kind = "NonpositiveMinor"


def _require_real(a: RationalMatrix, what: str) -> None:
    if not a.is_real():
        raise DomainError(f"{what} requires real entries")


def is_totally_nonnegative(a: RationalMatrix) -> TNN | NegativeMinor:
    """Exhaustive exact check of every minor; the witness is the first negative one."""
    _require_real(a, "total nonnegativity")
    check_cap(max(a.rows, a.cols), TNN_MAX_N, "TNN enumeration")
    for rs, cs, v in _iter_minors(a, minor_table(a)):
        if v.re < 0:
            return NegativeMinor(rs, cs, v)
    return TNN()


def is_totally_positive(a: RationalMatrix) -> TP | NonpositiveMinor:
    _require_real(a, "total positivity")
    check_cap(max(a.rows, a.cols), TNN_MAX_N, "TP enumeration")
    for rs, cs, v in _iter_minors(a, minor_table(a)):
        if v.re <= 0:
            return NonpositiveMinor(rs, cs, v)
    return TP()


def compound_matrix(a: RationalMatrix, k: int) -> RationalMatrix:
    """k-th compound: entry ``(J, I)`` is ``minor(a, J, I)``, subsets in lex order.

    ``k = 0`` gives the 1 x 1 identity.
    """
    if not 0 <= k <= min(a.rows, a.cols):
        raise DimensionError(f"compound order {k} out of range for shape {a.shape}")
    if k == 0:
        return RationalMatrix.identity(1)
    table = minor_table(a, k)[k]
    rmasks = [mask_of(s) for s in combinations(range(1, a.rows + 1), k)]
    cmasks = [mask_of(s) for s in combinations(range(1, a.cols + 1), k)]
    return RationalMatrix._trusted([[table[(r, c)] for c in cmasks] for r in rmasks])


def dual_matrix(a: RationalMatrix) -> RationalMatrix:
    """``dual[i, j] = (-1)**(n-j) * a[n+1-i, j]`` (1-based)."""
    if not a.is_square():
        raise DimensionError("dual matrix needs a square input")
    n = a.rows
    return RationalMatrix._trusted([
        [a.data[n - i][j - 1] if (n - j) % 2 == 0 else -a.data[n - i][j - 1]
         for j in range(1, n + 1)]
        for i in range(1, n + 1)
    ])


# -- Loewner-Whitney generators ----------------------------------------------------

GENERATOR_KINDS = ("D", "E", "F")


@dataclass(frozen=True)
class Letter:
    kind: str
    i: int
    t: object

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise DomainError(f"unknown generator kind {self.kind!r}")
        object.__setattr__(self, "t", rational(self.t))


@dataclass(frozen=True)
class GeneratorWord:
    """A product of generators, read left to right."""

    n: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        for letter in self.letters:
            _check_generator_index(letter.kind, letter.i, self.n)
            if letter.t <= 0:
                raise DomainError("generator parameters in a word must be positive")

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: GeneratorWord) -> GeneratorWord:
        if self.n != other.n:
            raise DimensionError("words act on different sizes")
        return GeneratorWord(self.n, self.letters + other.letters)


def _check_generator_index(kind: str, i: int, n: int) -> None:
    top = n if kind == "D" else n - 1
    if not 1 <= i <= top:
        raise DimensionError(f"{kind}_{i} out of range for n={n}")


def generator_matrix(kind: str, i: int, t, n: int) -> RationalMatrix:
    """``D_i(t)``, ``E_i(t)`` (t at row i, column i+1) or ``F_i(t) = E_i(t)^T``."""
    if kind not in GENERATOR_KINDS:
        raise DomainError(f"unknown generator kind {kind!r}")
    _check_generator_index(kind, i, n)
    t = GaussianRational.coerce(rational(t))
    m = [[ONE if r == c else ZERO for c in range(n)] for r in range(n)]
    if kind == "D":
        m[i - 1][i - 1] = t
    elif kind == "E":
        m[i - 1][i] = t
    else:
        m[i][i - 1] = t
    return RationalMatrix._trusted(m)


def word_to_matrix(word: GeneratorWord, n: int | None = None) -> RationalMatrix:
    n = word.n if n is None else n
    if n != word.n:
        raise DimensionError("word size does not match n")
    out = RationalMatrix.identity(n)
    for letter in word.letters:
        out = out @ generator_matrix(letter.kind, letter.i, letter.t, n)
    return out


def random_parameter(rng: random.Random):
    return rational(f"{rng.randint(1, 100)}/{rng.randint(1, 100)}")


def random_tnn_word(n: int, length: int, seed: int) -> GeneratorWord:
    """Uniformly random letters with parameters ``p/q``, ``p, q`` in ``[1, 100]``."""
    if length < 0:
        raise PreconditionError("word length must be nonnegative")
    rng = random.Random(seed)
    kinds = GENERATOR_KINDS if n > 1 else ("D",)
    letters = []
    for _ in range(length):
        kind = rng.choice(kinds)
        top = n if kind == "D" else n - 1
        letters.append(Letter(kind, rng.randint(1, top), random_parameter(rng)))
    return GeneratorWord(n, tuple(letters))


def tp_word(n: int, rng: random.Random) -> GeneratorWord:
    """``F``-block, positive diagonal, ``E``-block; each block repeats all indices n-1 times.

    ``(s_1 ... s_{n-1})^(n-1)`` contains a reduced word of the longest permutation,
    which is what makes the product totally positive.
    """
    letters = []
    for _ in range(n - 1):
        letters.extend(Letter("F", i, random_parameter(rng)) for i in range(1, n))
    letters.extend(Letter("D", i, random_parameter(rng)) for i in range(1, n + 1))
    for _ in range(n - 1):
        letters.extend(Letter("E", i, random_parameter(rng)) for i in range(n - 1, 0, -1))
    return GeneratorWord(n, tuple(letters))


def random_tp_matrix(n: int, seed: int, retries: int = 10) -> RationalMatrix:
    """Random totally positive matrix, verified exactly before it is returned."""
    rng = random.Random(seed)
    for _ in range(retries + 1):
        a = word_to_matrix(tp_word(n, rng))
        if is_totally_positive(a).ok:
            return a
    raise GenerationError(f"no totally positive matrix after {retries} retries (n={n})")


def random_rational_matrix(rows: int, cols: int, rng: random.Random,
                           num: int = 5, den: int = 4, nonneg: bool = False) -> RationalMatrix:
    lo = 0 if nonneg else -num
    return RationalMatrix([
        [rational(f"{rng.randint(lo, num)}/{rng.randint(1, den)}") for _ in range(cols)]
        for _ in range(rows)
    ])


# -- positive semidefiniteness -------------------------------------------------------

@dataclass(frozen=True)
class PSD:
    ok = True
    kind = "PSD"


@dataclass(frozen=True)
class NegativePrincipalMinor:
    indices: tuple[int, ...]
    value: GaussianRational
    ok = False
    kind = "NegativePrincipalMinor"


def is_psd(s: RationalMatrix) -> PSD | NegativePrincipalMinor:
    """Exact PSD test through all principal minors (first negative one is the witness).

    Principal submatrices through an all-zero row have determinant 0 and are skipped.
    """
    if not s.is_square():
        raise DimensionError("PSD test needs a square matrix")
    _require_real(s, "PSD test")
    if not s.is_symmetric():
        raise DomainError("PSD test needs a symmetric matrix")
    check_cap(s.rows, PSD_MAX_N, "PSD test")
    active = [i + 1 for i in range(s.rows) if any(s.data[i])]
    for k in range(1, len(active) + 1):
        for idx in combinations(active, k):
            v = _bareiss_det([[s.data[r - 1][c - 1] for c in idx] for r in idx])
            if v.re < 0:
                return NegativePrincipalMinor(idx, v)
    return PSD()


def negative_direction(s: RationalMatrix) -> list | None:
    """Rational vector ``v`` with ``v^T s v < 0``, or ``None`` if ``s`` is PSD.

    Uses a symmetric congruence ``P^T s P = diag(d)`` (Lagrange reduction); a
    negative ``d_k`` gives ``v = P e_k`` exactly.
    """
    _require_real(s, "negative direction")
    n = s.rows
    m = [[x.re for x in row] for row in s.data]
    p = [[rational(1 if i == j else 0) for j in range(n)] for i in range(n)]

    def add_to(i, j, f):
        # col_i += f * col_j and row_i += f * row_j (congruence); P tracks columns
        for r in range(n):
            m[r][i] += f * m[r][j]
        for c in range(n):
            m[i][c] += f * m[j][c]
        for r in range(n):
            p[r][i] += f * p[r][j]

    def swap(i, j):
        for r in range(n):
            m[r][i], m[r][j] = m[r][j], m[r][i]
        m[i], m[j] = m[j], m[i]
        for r in range(n):
            p[r][i], p[r][j] = p[r][j], p[r][i]

    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if m[i][j]), None)
            if pair is None:
                break
            i, j = pair
            add_to(i, j, 1)
            piv = i
        if piv != k:
            swap(k, piv)
        d = m[k][k]
        if d < 0:
            return [p[r][k] for r in range(n)]
        for r in range(k + 1, n):
            if m[r][k]:
                add_to(r, k, -m[r][k] / d)
    return None


# -- floating matrix exponential -------------------------------------------------------

def matrix_exp(z, t: float = 1.0, terms: int = 24) -> np.ndarray:
    """``exp(t z)`` by truncated Taylor series with scaling and squaring.

    The argument is scaled by ``2**-s`` until its infinity norm is at most 0.5.
    """
    if terms < 1:
        raise PreconditionError("need at least one Taylor term")
    if isinstance(z, RationalMatrix):
        z = z.to_numpy(float)
    x = np.asarray(z, dtype=float) * float(t)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError("matrix exponential needs a square matrix")
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite entries in matrix exponential")
    norm = np.abs(x).sum(axis=1).max() if x.size else 0.0
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    x = x / (2.0 ** s)
    n = x.shape[0]
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, terms + 1):
        term = term @ x / k
        result = result + term
    for _ in range(s):
        result = result @ result
    return result


def float_minors_min(a: np.ndarray) -> float:
    """Smallest minor of a float matrix (all sizes), via ``numpy.linalg.det``."""
    rows, cols = a.shape
    best = math.inf
    for k in range(1, min(rows, cols) + 1):
        for rs in combinations(range(rows), k):
            sub = a[list(rs)]
            for cs in combinations(range(cols), k):
                best = min(best, float(np.linalg.det(sub[:, list(cs)])))
    return best
