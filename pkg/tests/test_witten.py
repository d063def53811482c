import math
import threading
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from doper.fusion import build_pgl2_dopers, trivial_algebra
from doper.witten import (
    VirasoroOperator,
    apply_operator,
    bracket_check,
    build_partition,
    build_phi,
    clear_tau_cache,
    correlator,
    kdv_recursion_probe,
    tau,
    verify_canonical_virasoro,
    verify_virasoro,
    virasoro_operator,
    wzw_comparison,
)


# literature values of psi-class intersection numbers
@pytest.mark.parametrize("g, ds, expected", [
    (0, (0, 0, 0), Fraction(1)),
    (1, (1,), Fraction(1, 24)),
    (2, (4,), Fraction(1, 1152)),
    (3, (7,), Fraction(1, 82944)),
    (1, (2, 1, 0), Fraction(1, 12)),
    (1, (1, 1), Fraction(1, 24)),
    (3, (7, 1), Fraction(5, 82944)),
    (3, (6, 2), Fraction(77, 414720)),
    (2, (2, 3), Fraction(29, 5760)),
    (0, (1, 1, 0, 0, 0), Fraction(2)),
])
def test_tau_values(g, ds, expected):
    assert tau(g, ds) == expected


@pytest.mark.parametrize("g", range(1, 6))
def test_single_insertion(g):
    assert tau(g, (3 * g - 2,)) == Fraction(1, 24 ** g * math.factorial(g))


@settings(max_examples=60, deadline=None)
@given(ds=st.lists(st.integers(0, 4), min_size=3, max_size=7))
def test_genus_zero_multinomial(ds):
    r = len(ds)
    expected = Fraction(math.factorial(r - 3), math.prod(math.factorial(d) for d in ds)) if sum(ds) == r - 3 else 0
    assert tau(0, ds) == expected


def _keys(max_genus=3, max_sum=8):
    out = []
    for g in range(max_genus + 1):
        for r in range(1, 7):
            total = 3 * g - 3 + r
            if total < 0 or total > max_sum or 2 * g - 2 + r <= 0:
                continue
            stack = [()]
            while stack:
                cur = stack.pop()
                if len(cur) == r:
                    if sum(cur) == total:
                        out.append((g, cur))
                    continue
                lo = cur[-1] if cur else 0
                for d in range(lo, total - sum(cur) + 1):
                    stack.append(cur + (d,))
    return out


@pytest.mark.parametrize("g, ds", _keys())
def test_string_and_dilaton(g, ds):
    r = len(ds)
    # string equation
    lhs = tau(g, ds + (0,))
    rhs = sum(tau(g, ds[:i] + (ds[i] - 1,) + ds[i + 1:]) for i in range(r) if ds[i] > 0)
    if 2 * g - 2 + r > 0 and (g, r) != (0, 2):
        assert lhs == rhs
    # dilaton equation
    assert tau(g, ds + (1,)) == (2 * g - 2 + r) * tau(g, ds)


def test_dimension_vanishing():
    assert tau(1, (2,)) == 0
    assert tau(2, (1, 1)) == 0
    assert tau(0, (0, 0)) == 0
    assert tau(0, (0, 0, 0, 0)) == 0


def test_tau_threads_consistent():
    clear_tau_cache()
    keys = _keys(3, 8)
    results = {}

    def work(offset):
        for k in keys[offset::3] + keys:
            results.setdefault(k, set()).add(tau(*k))

    threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(len(v) == 1 for v in results.values())


def test_correlator_factorizes():
    A = build_pgl2_dopers(5)
    assert correlator(A, 1, [(1, 0)]) == Fraction(2, 24)
    assert correlator(A, 2, [(4, 0)]) == Fraction(5, 1152)
    assert correlator(A, 0, [(0, 0), (0, 1), (0, 1)]) == 1


def test_phi_coefficients():
    A = build_pgl2_dopers(5)
    phi = build_phi(A, 1, 3)
    assert phi.coefficient(-2, [(0, 0)] * 3) == Fraction(1, 6)
    assert phi.coefficient(0, [(1, 0)]) == Fraction(1, 12)
    assert phi.coefficient(-2, [(0, 0), (0, 1), (0, 1)]) == Fraction(1, 2)


@pytest.mark.parametrize("p", [5, 7])
@pytest.mark.parametrize("n", [-1, 0, 1, 2])
def test_virasoro(p, n):
    rep = verify_virasoro(n, build_pgl2_dopers(p), 2, 4)
    assert rep["ok"] and rep["checked"] > 0


def test_virasoro_trivial_algebra():
    A = trivial_algebra()
    for n in (-1, 0, 1, 2, 3):
        rep = verify_virasoro(n, A, 3, 6)
        assert rep["ok"] and rep["checked"] > 0


def test_virasoro_detects_perturbation():
    A = build_pgl2_dopers(5)
    Z = build_partition(A, 2, 4)
    op = virasoro_operator(0, A, Z.max_index() + 1)
    bad = VirasoroOperator(op.deriv, op.tderiv, op.dd, op.tt, op.const + Fraction(1, 7))
    image = apply_operator(bad, Z)
    assert any(c != 0 for (h, mono), c in image.items() if Z.exact_slot(h, len(mono)))


@pytest.mark.parametrize("n, m", [(0, -1), (1, -1), (2, -1), (1, 0), (2, 0)])
def test_brackets(n, m):
    rep = bracket_check(n, m, build_pgl2_dopers(5), 2, 4)
    assert rep["ok"]
    assert sum(r["checked"] for r in rep["panel"]) > 0


def test_bracket_rejects_low_index():
    with pytest.raises(ValueError):
        bracket_check(-1, -1, trivial_algebra())


def test_wzw_observed_ratio():
    rep = wzw_comparison(5, 2, 4)
    observed = rep["observed_ratio_by_genus"]
    for g, ratios in observed.items():
        assert ratios == [str(Fraction(2) ** g)]


def test_canonical_virasoro_branch_independent():
    A = build_pgl2_dopers(5)
    for branch in (0, 1):
        rep = verify_canonical_virasoro(A, 2, 2, 4, 256, root_branch=branch)
        assert rep["ok"]


def test_recursion_probe_trivial():
    rep = kdv_recursion_probe(trivial_algebra(), 1, 0, 2, 7)
    assert rep["any_ok"]
    assert all(c["checked"] > 0 for c in rep["candidates"].values())


def test_partition_exponential():
    A = trivial_algebra()
    Z = build_partition(A, 1, 3)
    assert Z.coefficient(0, ()) == 1
    assert Z.coefficient(-2, [(0, 0)] * 3) == Fraction(1, 6)
    assert Z.coefficient(0, [(1, 0)]) == Fraction(1, 24)

