import random

import pytest
from gmpy2 import mpq

from tnnstable.errors import NotAPointError, PreconditionError, SingularMatrixError
from tnnstable.grassmann import (
    GrassmannianPoint,
    PluckerVector,
    act,
    act_on_matrix,
    act_on_plucker,
    basis_indicator_polynomial,
    check_plucker_relations,
    dual_embedding,
    dual_point_polynomial,
    is_tnn_point,
    plucker_of_matrix,
    polynomial_to_plucker,
    positroid_support,
    representing_polynomial,
    standard_point_matrix,
)
from tnnstable.linalg import RationalMatrix, is_totally_nonnegative, random_tnn_word, random_tp_matrix, word_to_matrix
from tnnstable.operators import sharp_of_matrix, symbol
from tnnstable.poly import subsets

from conftest import M, P, rand_matrix


def gr24(*coords):
    return PluckerVector(4, 2, tuple(mpq(c) for c in coords))


def brute_relations(p):
    """Three-term relation for Gr(2, 4) written out by hand."""
    d = p.as_dict()
    return d[(1, 2)] * d[(3, 4)] - d[(1, 3)] * d[(2, 4)] + d[(1, 4)] * d[(2, 3)]


def test_plucker_of_matrix_examples():
    p = plucker_of_matrix(standard_point_matrix(4, 2))
    assert p.as_dict()[(1, 2)] == 1 and sum(1 for c in p.coords if c) == 1
    assert plucker_of_matrix(M([[1, 0], [1, 1], [0, 1]])).coords == (1, 1, 1)
    assert plucker_of_matrix(RationalMatrix.identity(3)).coords == (1,)
    with pytest.raises(NotAPointError):
        plucker_of_matrix(M([[1, 2], [2, 4], [3, 6]]))


def test_relation_examples():
    v = check_plucker_relations(gr24(1, 1, 1, 1, 1, 1))
    assert not v.ok and v.value == 1
    assert brute_relations(gr24(1, 1, 1, 1, 1, 1)) == 1
    assert check_plucker_relations(gr24(1, 1, 0, 0, 1, 1)).ok


def test_relations_match_three_term_form():
    rng = random.Random(3)
    for _ in range(200):
        p = gr24(*(rng.randint(-2, 2) for _ in range(6)))
        if not any(p.coords):
            continue
        assert check_plucker_relations(p).ok == (brute_relations(p) == 0)


def test_matrix_minors_satisfy_relations():
    rng = random.Random(11)
    checked = 0
    while checked < 200:
        n = rng.randint(2, 7)
        k = rng.randint(1, n)
        m = rand_matrix(rng, n, k, lo=-3, hi=3)
        if m.rank() < k:
            continue
        assert check_plucker_relations(plucker_of_matrix(m)).ok
        checked += 1


def test_representing_polynomial_examples():
    p0 = plucker_of_matrix(standard_point_matrix(4, 2))
    assert representing_polynomial(p0) == P(4, {(1, 2): 1})
    f = representing_polynomial(gr24(1, 1, 0, 0, 1, 1))
    assert f == P(4, {(1, 2): 1, (1, 3): 1, (2, 4): 1, (3, 4): 1})
    single = PluckerVector.from_mapping(4, 2, {(2, 4): mpq(7)})
    assert representing_polynomial(single) == P(4, {(2, 4): 7})


def test_polynomial_to_plucker_examples():
    r = polynomial_to_plucker(P(4, {(1, 2): 1, (3, 4): 1}))
    assert not r.ok and r.violation.value == 1
    g = polynomial_to_plucker(P(3, {(1, 2): 1, (1, 3): 1, (2, 3): 1}))
    assert isinstance(g, GrassmannianPoint) and g.plucker.coords == (1, 1, 1)
    assert g.plucker == plucker_of_matrix(M([[1, 0], [1, 1], [0, 1]]))
    assert polynomial_to_plucker(P(5, {(1, 2, 3): 1})).relations_verified
    with pytest.raises(PreconditionError):
        polynomial_to_plucker(P(3, {(1,): 1, (1, 2): 1}))


def test_is_tnn_point_examples():
    assert is_tnn_point(plucker_of_matrix(standard_point_matrix(5, 2))).ok
    assert is_tnn_point(gr24(1, 1, 0, 0, 1, 1)).ok
    assert is_tnn_point(gr24(-1, -1, 0, 0, -1, -1)).ok
    r = is_tnn_point(gr24(1, -1, 0, 0, -1, 1))
    assert check_plucker_relations(gr24(1, -1, 0, 0, -1, 1)).ok
    assert r.kind == "NotTNN"
    assert is_tnn_point(gr24(1, 1, 1, 1, 1, 1)).kind == "NotGrassmannian"


def test_positroid_and_indicator_examples():
    assert positroid_support(plucker_of_matrix(standard_point_matrix(4, 2))) == {(1, 2)}
    sup = positroid_support(gr24(1, 1, 0, 0, 1, 1))
    assert sup == {(1, 2), (1, 3), (2, 4), (3, 4)}
    assert positroid_support(gr24(1, 2, 3, 4, 5, 6)) == set(subsets(4, 2))
    assert basis_indicator_polynomial([(1, 2)]) == P(2, {(1, 2): 1})
    assert basis_indicator_polynomial([(1, 2), (1, 3), (2, 3)]) == P(3, {(1, 2): 1, (1, 3): 1, (2, 3): 1})
    assert basis_indicator_polynomial(sup) == P(4, {(1, 2): 1, (1, 3): 1, (2, 4): 1, (3, 4): 1})
    with pytest.raises(PreconditionError):
        basis_indicator_polynomial([])


def test_act_examples():
    rng = random.Random(5)
    m = rand_matrix(rng, 4, 2)
    v = GrassmannianPoint(plucker_of_matrix(m), matrix=m)
    assert act(RationalMatrix.identity(4), v).plucker == v.plucker
    for seed in range(100):
        n = 2 + seed % 5
        k = 1 + seed % (n - 1) if n > 2 else 1
        a = random_tp_matrix(n, seed)
        pt = act(a, standard_point_matrix(n, k))
        assert all(c.re > 0 for c in pt.plucker.coords)
        assert is_tnn_point(pt.plucker).ok
    with pytest.raises(SingularMatrixError):
        act(RationalMatrix.zeros(4, 4), m)


def test_act_paths_agree_and_compose():
    rng = random.Random(8)
    done = 0
    while done < 40:
        n = rng.randint(2, 5)
        k = rng.randint(1, n)
        a, b = rand_matrix(rng, n, n), rand_matrix(rng, n, n)
        m = rand_matrix(rng, n, k)
        if not a.det() or not b.det() or m.rank() < k:
            continue
        p = plucker_of_matrix(m)
        assert act_on_matrix(a, m).plucker == act_on_plucker(a, p)
        assert act(a @ b, m).plucker == act(a, act(b, m)).plucker
        done += 1


def test_dual_embedding_examples():
    z = dual_embedding(RationalMatrix.zeros(3, 3))
    assert positroid_support(z.plucker) == {(1, 2, 3)}
    assert dual_embedding(M([[1]])).plucker.coords == (1, 1)
    for seed in range(10):
        a = word_to_matrix(random_tnn_word(3, 6, seed))
        assert is_tnn_point(dual_embedding(a).plucker).ok


def test_dual_embedding_matches_symbol():
    rng = random.Random(21)
    for _ in range(30):
        n = rng.randint(1, 4)
        a = rand_matrix(rng, n, n, lo=-3, hi=3)
        assert dual_point_polynomial(a) == symbol(sharp_of_matrix(a))
        assert is_tnn_point(dual_embedding(a).plucker).ok == is_totally_nonnegative(a).ok


def test_symbol_relabeled_is_the_dual_point():
    from tnnstable.grassmann import symbol_in_dual_order

    rng = random.Random(22)
    for _ in range(10):
        n = rng.randint(1, 4)
        a = rand_matrix(rng, n, n)
        h = symbol(sharp_of_matrix(a))
        assert symbol_in_dual_order(h) == representing_polynomial(dual_embedding(a).plucker)
