import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvetheta.symindex import (
    Convention,
    build_table,
    sym_dim,
    sym_embed,
    sym_power,
    sym_sum_check,
)


def test_paper_order_pairs_g3():
    tab = build_table(3, 2, Convention.PAPER_ORDER)
    # 1-based pairs (11,22,33,12,13,23)
    assert [tuple(t + 1 for t in tup) for tup in tab.tuples] == [
        (1, 1), (2, 2), (3, 3), (1, 2), (1, 3), (2, 3)]
    assert tab.size == 6
    assert tab.chi == (2, 2, 2, 1, 1, 1)


def test_g1_n3_single_tuple():
    tab = build_table(1, 3)
    assert tab.tuples == ((0, 0, 0),)
    assert tab.chi == (6,)


def test_g2_n2_paper_order():
    tab = build_table(2, 2, Convention.PAPER_ORDER)
    assert [tuple(t + 1 for t in tup) for tup in tab.tuples] == [(1, 1), (2, 2), (1, 2)]
    assert tab.chi == (2, 2, 1)


def test_lam_surjection_is_initial_segment():
    # with the row-major staircase, {m(i,j): min(i,j) <= n} = {1..L}
    for g in (2, 3, 4):
        tab = build_table(g, 2, Convention.LAM_SURJECTION)
        M = g * (g + 1) // 2
        for n in range(1, g + 1):
            members = sorted({tab.pair_index(i, j)
                              for i in range(n) for j in range(g)})
            L = M - (g - n) * (g - n + 1) // 2
            assert members == list(range(L))


def test_lam_rejects_other_orders():
    with pytest.raises(ValueError):
        build_table(3, 3, Convention.LAM_SURJECTION)
    with pytest.raises(ValueError):
        build_table(0, 2)


def test_conventions_same_tuple_sets():
    for g, n in [(3, 2), (4, 2), (4, 3), (2, 3)]:
        tabs = [build_table(g, n, c) for c in (Convention.PAPER_ORDER, Convention.LEX_ORDER)]
        assert set(tabs[0].tuples) == set(tabs[1].tuples)
        assert sorted(tabs[0].chi) == sorted(tabs[1].chi)


def test_paper_order_triples_prefix_g4():
    tab = build_table(4, 3, Convention.PAPER_ORDER)
    one_based = [tuple(t + 1 for t in tup) for tup in tab.tuples]
    head = one_based[: 6 * 4 - 8]
    assert head == [
        (1, 1, 1), (2, 2, 2), (3, 3, 3), (4, 4, 4),
        (1, 1, 2), (1, 1, 3), (1, 1, 4),
        (2, 2, 3), (2, 2, 4),
        (1, 2, 2), (1, 2, 3), (1, 2, 4),
        (1, 3, 3), (1, 4, 4),
        (2, 3, 3), (2, 4, 4),
    ]
    assert len(one_based) == sym_dim(4, 3) == 20


def test_chi_n3_formula():
    tab = build_table(3, 3)
    for tup, chi in zip(tab.tuples, tab.chi):
        a, b, c = tup
        expect = (1 + (a == b) + (b == c)) * (1 + (a == c))
        assert chi == expect


def test_sym_power_identity_is_chi():
    for g, n in [(2, 2), (3, 2), (3, 3), (2, 4)]:
        tab = build_table(g, n)
        P = sym_power(np.eye(g), n, tab)
        assert np.allclose(P, np.diag(tab.chi))


def test_sym_power_g2_hand_expansion():
    # entry at (pair 11, pair 11) of (B B) is 2 a^2
    rng = np.random.default_rng(0)
    B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    tab = build_table(2, 2)
    P = sym_power(B, 2, tab)
    a, b, c, d = B[0, 0], B[0, 1], B[1, 0], B[1, 1]
    i11, i22, i12 = tab.index_of((0, 0)), tab.index_of((1, 1)), tab.index_of((0, 1))
    assert np.isclose(P[i11, i11], 2 * a * a)
    assert np.isclose(P[i11, i22], 2 * b * b)
    assert np.isclose(P[i11, i12], 2 * a * b)
    assert np.isclose(P[i12, i12], a * d + b * c)


@pytest.mark.parametrize("g,n", [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3)])
def test_sym_power_product_identity(g, n):
    rng = np.random.default_rng(g * 10 + n)
    tab = build_table(g, n)
    B = rng.normal(size=(g, g)) + 1j * rng.normal(size=(g, g))
    C = rng.normal(size=(g, g)) + 1j * rng.normal(size=(g, g))
    PB, PC = sym_power(B, n, tab), sym_power(C, n, tab)
    PBC = sym_power(B @ C, n, tab)
    lhs = PB @ np.diag(1.0 / np.array(tab.chi)) @ PC
    assert np.linalg.norm(lhs - PBC) <= 1e-12 * np.linalg.norm(PBC)


@pytest.mark.parametrize("g,n", [(2, 2), (3, 2), (4, 2), (4, 3), (3, 3)])
def test_det_inverse_identity(g, n):
    rng = np.random.default_rng(g + 5 * n)
    tab = build_table(g, n)
    B = rng.normal(size=(g, g)) + 1j * rng.normal(size=(g, g))
    Binv = np.linalg.inv(B)
    ichi = np.diag(1.0 / np.array(tab.chi))
    d1 = np.linalg.det(sym_power(B, n, tab) @ ichi)
    d2 = np.linalg.det(sym_power(Binv, n, tab) @ ichi)
    assert abs(d1 * d2 - 1.0) < 1e-10 * abs(d1 * d2)


def test_sym_embed_examples():
    tab = build_table(2, 2)
    # mixed coordinates die; the diagonal one carries its 1/chi weight
    v = sym_embed(np.array([1.0, 0.0]), 2, tab)
    assert np.allclose(v, [0.5, 0.0, 0.0])

    # product of all coordinates prod u...u_i = prod u_k^{(n/g) M_n}
    u = np.array([2.0, 3.0])
    T = np.array(tab.tuples)
    prods = np.prod(u[T], axis=1)
    assert np.isclose(np.prod(prods), (2.0 * 3.0) ** 3)

    ones = sym_embed(np.ones(2), 2, tab)
    assert np.allclose(ones, 1.0 / np.array(tab.chi))


@pytest.mark.parametrize("g,n", [(2, 2), (3, 2), (3, 3)])
def test_sym_embed_compatibility(g, n):
    rng = np.random.default_rng(99)
    tab = build_table(g, n)
    B = rng.normal(size=(g, g)) + 1j * rng.normal(size=(g, g))
    u = rng.normal(size=g) + 1j * rng.normal(size=g)
    lhs = sym_embed(B @ u, n, tab)
    rhs = sym_power(B, n, tab) @ sym_embed(u, n, tab) / np.array(tab.chi)
    assert np.allclose(lhs, rhs)


@given(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=3),
       st.integers(min_value=-5, max_value=5), st.integers(min_value=-3, max_value=3),
       st.integers(min_value=-2, max_value=2))
@settings(max_examples=40, deadline=None)
def test_reindexing_identity_exact(g, n, a, b, c):
    # arbitrary integer-valued tabulated f, checked exactly
    def f(*idx):
        return a * sum(idx) ** 2 + b * math.prod(i + 1 for i in idx) + c

    lhs, rhs_num, denom = sym_sum_check(f, g, n)
    assert lhs * denom == rhs_num


def test_json_roundtrip():
    import json
    tab = build_table(3, 2)
    payload = json.loads(tab.to_json())
    assert payload["g"] == 3 and payload["chi"] == [2, 2, 2, 1, 1, 1]
