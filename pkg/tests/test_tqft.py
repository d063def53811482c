import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from doper.fusion import build_pgl2_dopers, build_sl2_wzw, trivial_algebra
from doper.tqft import (
    DualGraph,
    InvalidGraph,
    IntegralityViolation,
    algebra_value,
    check_loop_factorization,
    check_tail,
    check_tree_factorization,
    contract,
    degree_exact,
    degree_float,
    degree_table,
    degree_via_s_matrix,
    enumerate_trivalent_graphs,
    factorization_suite,
    graph_independence,
    inertia_prime_bound,
    pants_decomposition,
    pgln_degree,
    three_point_with_unit,
)


def oracle_degree(p, g, radii):
    """Float Verlinde sum from simultaneous eigenvectors of integer fusion matrices."""
    n = (p - 1) // 2

    def N(a, b, c):
        A, B, C = 2 * a, 2 * b, 2 * c
        s = A + B + C
        return int(s % 2 == 0 and s // 2 <= p - 2 and abs(B - C) <= A <= B + C)

    mats = [np.array([[N(a, b, c) for c in range(n)] for b in range(n)], dtype=float) for a in range(n)]
    generic = sum((k + 1.37) * m for k, m in enumerate(mats))
    _, vecs = np.linalg.eigh(generic)
    chars = [(m @ vecs)[0] / vecs[0] for m in mats]  # chars[a][lam]
    nu = 1 / sum(c ** 2 for c in chars)
    total = sum(nu[l] ** (1 - g) * np.prod([chars[a][l] for a in radii]) for l in range(n))
    return total


# frozen from the closed sine sums: sum 1/sin^2 = (p^2-1)/3, sum 1/sin^4 = (p^2-1)(p^2+11)/45
@pytest.mark.parametrize("p", [5, 7, 11, 13, 17])
def test_closed_forms(p):
    assert degree_exact(p, 2, 0) == Fraction(p ** 3 - p, 24)
    assert degree_exact(p, 3, 0) == Fraction(p ** 2 * (p ** 2 - 1) * (p ** 2 + 11), 1440)
    assert degree_exact(p, 1, 1, (0,)) == (p - 1) // 2


def test_spot_values():
    assert degree_exact(5, 2, 0) == 5
    assert degree_exact(7, 2, 0) == 14
    assert degree_exact(5, 0, 3, (0, 0, 0)) == 1
    assert degree_exact(5, 0, 3, (0, 0, 1)) == 0
    assert degree_exact(7, 3, 0) == 98


@pytest.mark.parametrize("p", [5, 7, 11])
def test_against_float_oracle(p):
    n = (p - 1) // 2
    for g, r in [(0, 3), (0, 4), (1, 1), (1, 2), (2, 0), (2, 1), (3, 0), (1, 3)]:
        for radii in itertools.combinations_with_replacement(range(n), r):
            assert abs(float(degree_exact(p, g, r, radii)) - oracle_degree(p, g, radii)) < 1e-6 * max(1, abs(oracle_degree(p, g, radii)))


@pytest.mark.parametrize("p", [5, 7])
def test_four_methods(p):
    A = build_pgl2_dopers(p)
    for g, r in [(0, 3), (0, 4), (1, 1), (1, 2), (2, 0), (2, 1)]:
        for radii in itertools.product(range((p - 1) // 2), repeat=r):
            exact = degree_exact(p, g, r, radii)
            assert contract(A, pants_decomposition(g, r, radii)) == exact
            assert degree_float(p, g, r, radii).value == exact
            assert degree_via_s_matrix(p, g, r, radii).value == exact


@settings(max_examples=50, deadline=None)
@given(p=st.sampled_from([5, 7, 11, 13]), g=st.integers(0, 3), data=st.data())
def test_symmetry_and_tail(p, g, data):
    r = data.draw(st.integers(max(0, 3 - 2 * g), 4))
    radii = data.draw(st.lists(st.integers(0, (p - 3) // 2), min_size=r, max_size=r))
    value = degree_exact(p, g, r, radii)
    perm = data.draw(st.permutations(radii))
    assert degree_exact(p, g, r, perm) == value
    assert value.denominator == 1 and value >= 0
    assert degree_exact(p, g, r + 1, list(radii) + [0]) == value


def test_three_point_metric():
    for p in [5, 7, 11]:
        for a in range((p - 1) // 2):
            for b in range((p - 1) // 2):
                assert three_point_with_unit(p, a, b) == int(a == b)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        degree_exact(5, 0, 2, (0, 0))
    with pytest.raises(ValueError):
        degree_exact(9, 2, 0)
    with pytest.raises(ValueError):
        degree_exact(5, 0, 3, (0, 0, 2))
    with pytest.raises(ValueError):
        degree_exact(5, 0, 3, (0, 0))


def test_integrality_violation_is_an_assertion():
    assert issubclass(IntegralityViolation, AssertionError)


def test_algebra_value_unstable_types():
    A = build_pgl2_dopers(7)
    assert algebra_value(A, 0, [1, 1]) == 1
    assert algebra_value(A, 0, [1, 2]) == 0
    assert algebra_value(A, 1, []) == A.dim
    T = trivial_algebra()
    assert algebra_value(T, 5, []) == 1


@pytest.mark.parametrize("g, r, count", [(0, 3, 1), (0, 4, 3), (0, 5, 15), (1, 1, 1), (1, 2, 2), (2, 0, 2)])
def test_graph_counts(g, r, count):
    graphs = enumerate_trivalent_graphs(g, r)
    assert len(graphs) == count
    for G in graphs:
        G.validate(g, r)


def test_invalid_graphs():
    with pytest.raises(InvalidGraph):
        DualGraph.from_incidence(2, [0, 0, 1, 1], [])
    with pytest.raises(InvalidGraph):
        DualGraph.from_incidence(1, [0], [(0, 0), (0, 0)])
    with pytest.raises(InvalidGraph):
        pants_decomposition(2, 0).validate(1, 0)


@pytest.mark.parametrize("p", [5, 7])
def test_graph_independence(p):
    reports = graph_independence(p)
    assert reports and all(r["ok"] for r in reports)


def test_contract_threads_deterministic():
    A = build_pgl2_dopers(11)
    G = pants_decomposition(2, 2, (1, 3))
    v = contract(A, G)
    assert contract(A, G, threads=4) == v == degree_exact(11, 2, 2, (1, 3))


def test_contract_other_algebras():
    U = build_sl2_wzw(5)
    half = U.basis[1]
    G = pants_decomposition(1, 2, (half, half))
    assert contract(U, G) == algebra_value(U, 1, [half, half])


@pytest.mark.parametrize("p", [5, 7])
def test_factorization_suite(p):
    reports = factorization_suite(p)
    assert len(reports) > 100
    assert all(r["ok"] for r in reports)


def test_factorization_on_wzw():
    U = build_sl2_wzw(7)
    b = U.basis
    assert check_tree_factorization(U, 0, 2, (b[1], b[1]), 1, 1, (b[2],))["ok"]
    assert check_loop_factorization(U, 1, 2, (b[3], b[1]))["ok"]
    assert check_tail(U, 1, 1, (b[2],))["ok"]
    assert check_tail(7, 0, 2, (1, 1))["ok"]


def test_pgln():
    assert pgln_degree(2, 2, 5) == degree_exact(5, 2, 0)
    assert pgln_degree(2, 2, 7) == degree_exact(7, 2, 0)
    assert pgln_degree(2, 3, 5) == degree_exact(5, 3, 0)
    assert pgln_degree(2, 3, 7) == degree_exact(7, 3, 0)
    with pytest.raises(ValueError):
        pgln_degree(3, 2, 5)
    with pytest.raises(ValueError):
        pgln_degree(2, 1, 7)


def test_pgln_three_is_integer():
    v = pgln_degree(3, 2, 7)
    assert v.denominator == 1 and v > 0


def test_inertia_prime_bound():
    assert inertia_prime_bound(0, 3, 5) == 4
    assert inertia_prime_bound(1, 1, 5) == 15
    assert inertia_prime_bound(2, 0, 5) == 510


def test_degree_table_threads():
    rows = degree_table(11, 0, 4)
    assert rows == degree_table(11, 0, 4, threads=4)
    assert len(rows) == 5 ** 4
