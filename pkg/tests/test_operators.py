import math
import random

import numpy as np
import pytest
from gmpy2 import mpq

from tnnstable.errors import DimensionError, DomainError, SizeCapError
from tnnstable.linalg import (
    GeneratorWord,
    Letter,
    RationalMatrix,
    generator_matrix,
    matrix_exp,
    random_tnn_word,
    word_to_matrix,
)
from tnnstable.operators import (
    MultiaffineOperator,
    PreserverStatus,
    apply_dense,
    delta_Z,
    exp_t_delta,
    extend,
    sharp_dense,
    sharp_of_matrix,
    sharp_via_generators,
    symbol,
    test_sharp_preserver_exact as sharp_preserver_exact,
    test_stability_preserver as stability_preserver,
)
from tnnstable.poly import MultiaffinePoly, elementary_symmetric, mask_of
from tnnstable.stability import Status, falsify_stability

from conftest import M, P, rand_matrix

A, B, C, D = (mpq(v) for v in (2, 3, 5, 7))
Q = M([[A, C], [B, D]])


def test_apply_examples():
    f = P(3, {(1, 2): 3, (): 1, (3,): -2})
    assert MultiaffineOperator.identity(3)(f) == f
    assert MultiaffineOperator.zero(3)(f).is_zero()
    assert sharp_of_matrix(Q)(P(2, {(1,): 1})) == P(2, {(1,): A, (2,): B})
    with pytest.raises(DimensionError):
        MultiaffineOperator.identity(2)(f)


def test_sharp_2x2_images():
    q = sharp_of_matrix(Q)
    assert q.image(()) == P(2, {(): 1})
    assert q.image((1,)) == P(2, {(1,): A, (2,): B})
    assert q.image((2,)) == P(2, {(1,): C, (2,): D})
    assert q.image((1, 2)) == P(2, {(1, 2): A * D - B * C})
    assert sharp_of_matrix(RationalMatrix.identity(4)) == MultiaffineOperator.identity(4)


def test_embedded_generator_case():
    e = generator_matrix("E", 1, 5, 3)
    assert sharp_of_matrix(e)(P(3, {(1, 3): 1})) == P(3, {(1, 3): 1})


def test_generator_path_examples():
    assert sharp_via_generators(GeneratorWord(3, ())) == MultiaffineOperator.identity(3)
    t = mpq(7, 3)
    op = sharp_via_generators(GeneratorWord(2, (Letter("D", 1, t),)))
    assert op(P(2, {(1, 2): 1})) == P(2, {(1, 2): t})
    w = GeneratorWord(2, (Letter("E", 1, 1), Letter("F", 1, 1)))
    assert sharp_via_generators(w) == sharp_of_matrix(M([[2, 1], [1, 1]]))


def test_generator_path_equals_compound_path():
    for seed in range(200):
        n = 1 + seed % 6
        w = random_tnn_word(n, random.Random(seed).randint(0, 3 * n), seed)
        assert sharp_via_generators(w) == sharp_of_matrix(word_to_matrix(w))


def test_functoriality_and_degree():
    rng = random.Random(17)
    for _ in range(30):
        n = rng.randint(1, 5)
        a, b = rand_matrix(rng, n, n), rand_matrix(rng, n, n)
        assert sharp_of_matrix(a @ b) == sharp_of_matrix(a) @ sharp_of_matrix(b)
        sa = sharp_of_matrix(a)
        for s in range(1 << n):
            img = sa.image(s)
            assert img.is_zero() or (img.is_homogeneous() and img.degree() == bin(s).count("1"))


def test_symbol_examples():
    # x1 -> slot 1, x2 -> slot 2, y1 -> slot 3, y2 -> slot 4
    h = symbol(sharp_of_matrix(Q))
    assert h == P(4, {(3, 4): 1, (1, 4): A, (2, 4): B, (1, 3): C, (2, 3): D, (1, 2): A * D - B * C})
    expected = MultiaffinePoly.constant(3)
    for i in range(1, 4):
        expected = expected * P(6, {(i,): 1, (i + 3,): 1}) if i > 1 else P(6, {(1,): 1, (4,): 1})
    assert symbol(MultiaffineOperator.identity(3)) == expected
    only_one = MultiaffineOperator(3, {0: MultiaffinePoly.constant(3)})
    assert symbol(only_one) == P(6, {(4, 5, 6): 1})


def test_symbol_size_cap(monkeypatch):
    monkeypatch.setenv("TNN_STABLE_MAX_N", "2")
    with pytest.raises(SizeCapError):
        symbol(MultiaffineOperator.identity(3))


def test_preserver_examples():
    a = word_to_matrix(random_tnn_word(3, 6, 2))
    v = stability_preserver(sharp_of_matrix(a), 2000)
    assert v.status is PreserverStatus.TRUE_PRESERVER
    swap = M([[0, 1], [1, 0]])
    v = stability_preserver(sharp_of_matrix(swap))
    assert v.status is PreserverStatus.NOT_PRESERVER and v.witness.kind == "phase"
    # f -> f(0) x1
    rank_one = MultiaffineOperator(2, {0: P(2, {(1,): 1})})
    v = stability_preserver(rank_one)
    assert v.status is PreserverStatus.RANK_ONE_PRESERVER and v.rank == 1
    bad_rank_one = MultiaffineOperator(2, {0: P(2, {(1, 2): 1, (): 1})})
    assert stability_preserver(bad_rank_one, 2000).status is PreserverStatus.NOT_PRESERVER
    assert stability_preserver(MultiaffineOperator.zero(2)).ok


def test_exact_preserver_examples():
    a = word_to_matrix(random_tnn_word(4, 10, 5))
    assert sharp_preserver_exact(a).status is PreserverStatus.TRUE_PRESERVER
    v = sharp_preserver_exact(M([[0, 1], [1, 0]]))
    assert v.status is PreserverStatus.NOT_PRESERVER
    assert (v.witness.rows, v.witness.cols, v.witness.value) == ((1, 2), (1, 2), -1)
    assert sharp_preserver_exact(RationalMatrix.zeros(3, 3)).status is PreserverStatus.TRUE_PRESERVER


def test_rank():
    assert MultiaffineOperator.zero(2).rank() == 0
    assert MultiaffineOperator.identity(3).rank() == 8
    assert sharp_of_matrix(RationalMatrix.zeros(3, 3)).rank() == 1


def test_extend_examples():
    assert extend(MultiaffineOperator.identity(2), 2) == MultiaffineOperator.identity(4)
    q1 = extend(sharp_of_matrix(Q), 1)
    assert q1(P(3, {(1, 3): 1})) == P(3, {(1, 3): A, (2, 3): B})
    with pytest.raises(DimensionError):
        extend(MultiaffineOperator.identity(10), 7)


def test_extend_symbol_factorizes():
    rng = random.Random(1)
    n, m = 2, 2
    phi = sharp_of_matrix(rand_matrix(rng, n, n))
    total = n + m
    # x_i -> i, y_i -> total + i in the extended symbol.
    h = symbol(phi).embed(2 * total, [1, 2, total + 1, total + 2])
    for j in range(1, m + 1):
        h = h * P(2 * total, {(n + j,): 1, (total + n + j,): 1})
    assert symbol(extend(phi, m)) == h


def test_delta_examples():
    z = M([[1, 2], [3, 4]])
    dz = delta_Z(z)
    assert dz(P(2, {(1,): 1})) == P(2, {(1,): 1, (2,): 3})
    assert dz(P(2, {(1, 2): 1})) == P(2, {(1, 2): 5})
    assert dz(P(2, {(): 1})).is_zero()
    with pytest.raises(DomainError):
        delta_Z(RationalMatrix([[1j]]))


def test_delta_linear():
    rng = random.Random(6)
    for _ in range(20):
        n = rng.randint(1, 4)
        z1, z2 = rand_matrix(rng, n, n), rand_matrix(rng, n, n)
        assert delta_Z(z1 + z2) == delta_Z(z1) + delta_Z(z2)


def tridiagonal(rng, n):
    z = np.zeros((n, n))
    for i in range(n):
        z[i, i] = rng.uniform(-2, 2)
        if i + 1 < n:
            z[i, i + 1], z[i + 1, i] = rng.uniform(0, 2), rng.uniform(0, 2)
    return z


def exact(z):
    return RationalMatrix([[mpq(float(v)) for v in row] for row in z])


def test_exp_t_delta_examples():
    z = M([[1, 2], [3, 4]])
    assert np.array_equal(exp_t_delta(z, 0.0), np.eye(4))
    rng = np.random.default_rng(3)
    for n in (2, 3):
        zt = tridiagonal(rng, n)
        lhs = exp_t_delta(exact(zt), 0.5)
        assert np.abs(lhs - sharp_dense(matrix_exp(zt, 0.5))).max() <= 1e-8
    zs = [0.3, -1.0, 0.7]
    e = exp_t_delta(exact(np.diag(zs)), 1.0)
    for s in range(8):
        want = math.exp(sum(zs[i] for i in range(3) if s >> i & 1))
        assert abs(e[s, s] - want) <= 1e-12 * want
    assert np.abs(e - np.diag(np.diag(e))).max() == 0


def test_first_order_consistency():
    rng = np.random.default_rng(4)
    z = exact(rng.uniform(-1, 1, size=(3, 3)))
    d = delta_Z(z).to_dense().real
    est = {}
    for h in (1e-3, 1e-4):
        est[h] = (exp_t_delta(z, h) - np.eye(8)) / h
    # first-order error is linear in h, so one Richardson step removes it
    rich = (est[1e-4] * 10 - est[1e-3]) / 9
    assert np.abs(rich - d).max() <= 1e-6


def test_exp_preserves_stability_property():
    rng = np.random.default_rng(9)
    e2 = elementary_symmetric(4, 2)
    for t in (0.1, 0.5, 1.0):
        z = rng.uniform(0, 2, size=(4, 4))
        np.fill_diagonal(z, rng.uniform(-2, 2, size=4))
        g = apply_dense(exp_t_delta(exact(z), t), e2)
        assert falsify_stability(g, 2000, 0).status is Status.NO_COUNTEREXAMPLE


def test_dense_roundtrip():
    op = sharp_of_matrix(Q)
    f = P(2, {(1,): 1, (1, 2): 2})
    got = apply_dense(op.to_dense(), f)
    assert got == op(f)
    assert op.to_dense()[mask_of((1, 2)), mask_of((1, 2))] == float(A * D - B * C)
