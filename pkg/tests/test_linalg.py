import math
import random
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from tnnstable.errors import DimensionError, DomainError, GenerationError, SizeCapError
from tnnstable.gaussian import gq
from tnnstable.linalg import (
    GeneratorWord,
    Letter,
    RationalMatrix,
    compound_matrix,
    dual_matrix,
    float_minors_min,
    generator_matrix,
    is_psd,
    is_totally_nonnegative,
    is_totally_positive,
    matrix_exp,
    minor,
    minor_table,
    negative_direction,
    random_tnn_word,
    random_tp_matrix,
    word_to_matrix,
)

from conftest import M, rand_matrix


def leibniz(rows):
    """Determinant by the permutation expansion (independent of Bareiss)."""
    n = len(rows)
    total = Fraction(0)
    for p in permutations(range(n)):
        sign = (-1) ** sum(1 for a in range(n) for b in range(a + 1, n) if p[a] > p[b])
        term = Fraction(sign)
        for r in range(n):
            term *= Fraction(str(rows[r][p[r]].re))
        total += term
    return total


def test_minor_examples():
    assert minor(RationalMatrix.identity(3), (1, 2), (1, 2)) == 1
    assert minor(M([[1, 0], [1, 1], [0, 1]]), (2, 3), (1, 2)) == 1
    assert minor(M([[0, 1], [1, 0]]), (1, 2), (1, 2)) == -1
    with pytest.raises(DimensionError):
        minor(RationalMatrix.identity(3), (1, 2), (1,))


def test_minor_matches_leibniz(rng):
    for _ in range(30):
        a = rand_matrix(rng, 5, 5)
        for k in (1, 2, 3, 4, 5):
            rs = tuple(sorted(rng.sample(range(1, 6), k)))
            cs = tuple(sorted(rng.sample(range(1, 6), k)))
            sub = [[a.data[r - 1][c - 1] for c in cs] for r in rs]
            assert Fraction(str(minor(a, rs, cs).re)) == leibniz(sub)


def test_minor_table_matches_bareiss(rng):
    a = rand_matrix(rng, 4, 5)
    levels = minor_table(a)
    for k in range(1, 5):
        for rs in combinations(range(1, 5), k):
            for cs in combinations(range(1, 6), k):
                rm = sum(1 << (r - 1) for r in rs)
                cm = sum(1 << (c - 1) for c in cs)
                assert levels[k][(rm, cm)] == minor(a, rs, cs)


def test_tnn_examples():
    assert is_totally_nonnegative(RationalMatrix.identity(3)).ok
    w = is_totally_nonnegative(M([[0, 1], [1, 0]]))
    assert not w.ok and (w.rows, w.cols, w.value) == ((1, 2), (1, 2), -1)
    assert is_totally_nonnegative(M([[1, 1], [1, 2]])).ok
    with pytest.raises(DomainError):
        is_totally_nonnegative(RationalMatrix([[gq(1, 1)]]))


def test_tnn_witness_is_first_in_order():
    # Both the (1,1) entry and the 2x2 minor are negative; size 1 comes first.
    w = is_totally_nonnegative(M([[-1, 1], [1, 1]]))
    assert (w.rows, w.cols, w.value) == ((1,), (1,), -1)
    w = is_totally_nonnegative(M([[1, 2], [2, 1]]))
    assert (w.rows, w.cols) == ((1, 2), (1, 2))


def test_tp_examples():
    assert is_totally_positive(M([[1, 1], [1, 2]])).ok
    w = is_totally_positive(RationalMatrix.identity(2))
    assert (w.rows, w.cols, w.value) == ((1,), (2,), 0)
    assert is_totally_positive(M([[2, 1], [1, 1]])).ok


def test_compound_examples():
    a, b, c, d = (mpq(v) for v in (2, 3, 5, 7))
    q = M([[a, c], [b, d]])
    assert compound_matrix(q, 2) == M([[a * d - b * c]])
    assert compound_matrix(q, 1) == q
    assert compound_matrix(RationalMatrix.identity(4), 2) == RationalMatrix.identity(6)
    assert compound_matrix(q, 0) == RationalMatrix.identity(1)
    with pytest.raises(DimensionError):
        compound_matrix(q, 3)


def test_generator_examples():
    assert generator_matrix("D", 1, 2, 2) == M([[2, 0], [0, 1]])
    assert generator_matrix("E", 1, 5, 2) == M([[1, 5], [0, 1]])
    assert generator_matrix("F", 1, 5, 2) == M([[1, 0], [5, 1]])
    with pytest.raises(DimensionError):
        generator_matrix("E", 2, 1, 2)


def test_word_examples():
    assert word_to_matrix(GeneratorWord(3, ())) == RationalMatrix.identity(3)
    assert word_to_matrix(GeneratorWord(2, (Letter("E", 1, 1),))) == M([[1, 1], [0, 1]])
    w = GeneratorWord(2, (Letter("E", 1, 1), Letter("F", 1, 1)))
    assert word_to_matrix(w) == M([[2, 1], [1, 1]])
    with pytest.raises(Exception):
        GeneratorWord(2, (Letter("E", 1, -1),))


def test_random_words_are_tnn():
    assert word_to_matrix(random_tnn_word(4, 0, 1)) == RationalMatrix.identity(4)
    for seed in range(30):
        n = 2 + seed % 5
        a = word_to_matrix(random_tnn_word(n, 3 * n, seed))
        assert is_totally_nonnegative(a).ok
        assert a.det() != 0


def test_random_tp_matrices():
    for seed in range(10):
        n = 2 + seed % 5
        a = random_tp_matrix(n, seed)
        assert is_totally_positive(a).ok
        assert is_totally_nonnegative(a).ok and a.det() != 0
    assert random_tp_matrix(4, 3) == random_tp_matrix(4, 3)


def test_random_tp_gives_up(monkeypatch):
    import tnnstable.linalg as la

    monkeypatch.setattr(la, "is_totally_positive", lambda a: la.NonpositiveMinor((1,), (1,), 0))
    with pytest.raises(GenerationError):
        la.random_tp_matrix(3, 0, retries=2)


def test_semigroup_closure():
    for seed in range(10):
        a = word_to_matrix(random_tnn_word(4, 6, seed))
        b = word_to_matrix(random_tnn_word(4, 6, seed + 100))
        assert is_totally_nonnegative(a @ b).ok


def test_tnn_size_cap(monkeypatch):
    monkeypatch.setenv("TNN_STABLE_MAX_N", "3")
    with pytest.raises(SizeCapError):
        is_totally_nonnegative(RationalMatrix.identity(4))
    monkeypatch.setenv("TNN_STABLE_MAX_N", "99")
    with pytest.raises(SizeCapError):
        is_totally_nonnegative(RationalMatrix.identity(9))


def test_psd_examples():
    assert is_psd(M([[1, 0], [0, 1]])).ok
    w = is_psd(M([[0, 1], [1, 0]]))
    assert not w.ok and (w.indices, w.value) == ((1, 2), -1)
    assert is_psd(M([[1, 1], [1, 1]])).ok
    with pytest.raises(DomainError):
        is_psd(M([[1, 2], [0, 1]]))


def test_psd_agrees_with_eigenvalues():
    rng = random.Random(7)
    for _ in range(500):
        n = rng.randint(1, 6)
        r = rng.randint(1, n)
        b = rand_matrix(rng, n, r, lo=-3, hi=3)
        s = b @ b.T
        if rng.random() < 0.5:
            s = s - RationalMatrix([[mpq(rng.randint(0, 2)) if i == j else mpq(0) for j in range(n)]
                                    for i in range(n)])
        arr = s.to_numpy()
        lam = np.linalg.eigvalsh(arr).min()
        cert = is_psd(s)
        tol = 1e-9 * max(1.0, np.abs(arr).max())
        assert cert.ok == (lam >= -tol), (arr, lam)
        if not cert.ok:
            v = negative_direction(s)
            q = sum(v[i] * s.data[i][j].re * v[j] for i in range(n) for j in range(n))
            assert q < 0


def test_matrix_exp_examples():
    z = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(matrix_exp(z, 0.0), np.eye(2), atol=0)
    assert np.allclose(matrix_exp(z, 1.0), [[1, 1], [0, 1]], atol=1e-14)
    d = matrix_exp(np.diag([1.0, 2.0]), 1.0)
    assert abs(d[0, 0] - math.e) <= 1e-10 * math.e
    assert abs(d[1, 1] - math.e ** 2) <= 1e-10 * math.e ** 2
    with pytest.raises(Exception):
        matrix_exp(np.array([[np.inf]]), 1.0)


def test_matrix_exp_accuracy_against_scipy():
    from scipy.linalg import expm

    rng = np.random.default_rng(0)
    for _ in range(20):
        z = rng.uniform(-2, 2, size=(4, 4))
        t = 10.0 / np.abs(z).sum(axis=1).max()
        ref = expm(t * z)
        assert np.abs(matrix_exp(z, t) - ref).max() <= 1e-10 * np.abs(ref).max()


def tridiagonal(rng, n):
    z = np.zeros((n, n))
    for i in range(n):
        z[i, i] = rng.uniform(-2, 2)
        if i + 1 < n:
            z[i, i + 1], z[i + 1, i] = rng.uniform(0, 2), rng.uniform(0, 2)
    return z


def test_matrix_exp_semigroup():
    rng = np.random.default_rng(1)
    for _ in range(20):
        z = tridiagonal(rng, int(rng.integers(2, 6)))
        s, t = rng.uniform(0, 1, 2)
        lhs = matrix_exp(z, s + t)
        assert np.abs(lhs - matrix_exp(z, s) @ matrix_exp(z, t)).max() <= 1e-8
        assert float_minors_min(lhs) >= -1e-9


def test_dual_examples():
    a = mpq(3)
    assert dual_matrix(M([[a]])) == M([[a]])
    q = M([[2, 5], [3, 7]])  # [[a, c], [b, d]]
    assert dual_matrix(q) == M([[-3, 7], [-2, 5]])
    assert dual_matrix(RationalMatrix.zeros(3, 3)) == RationalMatrix.zeros(3, 3)


def rat_matrices(n):
    return st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n).map(M)


@settings(max_examples=100)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(rat_matrices(n), rat_matrices(n))))
def test_cauchy_binet(pair):
    a, b = pair
    for k in range(a.rows + 1):
        assert compound_matrix(a @ b, k) == compound_matrix(a, k) @ compound_matrix(b, k)
