from __future__ import annotations

import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramsey_mult.constructions import build_named, build_omega
from ramsey_mult.core import DiscreteColouring, EquationSpec, MonoSolution
from ramsey_mult.counting import CountQuery, count_solutions
from ramsey_mult.verify import (
    BudgetExceeded,
    PatternM,
    PatternT,
    _monochromatic_ap,
    auxiliary_threshold,
    find_in_pattern_M,
    find_in_pattern_M_general,
    minimize,
    pattern_soundness,
    random_pattern_colouring,
    recheck_witness,
    stability_check,
    verify_lemma31,
)

XY = EquationSpec((1, 1))


# --- nine-element pattern -------------------------------------------------------------


def nine_element_oracle(a, l, k):  # noqa: E741
    elems = sorted({l, k, l * k, a, l * a, k * a, l * k * a, l * l * a, l * l * k * a})
    distinct_needed = a not in (l, k, l * k) and k not in (l * a, l * l * a) and l != k * a
    triples = [(x, y) for x in elems for y in elems if x * y in elems and (x * y) % a == 0]
    if distinct_needed:
        triples = [(x, y) for x, y in triples if x != y]
    for bits in product((0, 1), repeat=len(elems)):
        c = dict(zip(elems, bits))
        if c[l] == c[k]:
            continue
        if not any(c[x] == c[y] == c[x * y] for x, y in triples):
            return False
    return True


def test_pattern_t_elements():
    p = PatternT(5, 2, 3)
    assert sorted(p.elements) == [2, 3, 5, 6, 10, 15, 20, 30, 60]
    assert p.side_conditions()
    assert not PatternT(6, 2, 3).side_conditions()
    with pytest.raises(ValueError):
        PatternT(1, 2, 3)


@pytest.mark.parametrize("a, l, k", [(5, 2, 3), (7, 2, 5)])
def test_nine_element_examples(a, l, k):  # noqa: E741
    assert verify_lemma31(a, l, k)
    assert nine_element_oracle(a, l, k)


def test_nine_element_matches_oracle_on_small_cube():
    for a, l, k in product(range(2, 8), repeat=3):  # noqa: E741
        if l == k:
            continue
        assert verify_lemma31(a, l, k) == nine_element_oracle(a, l, k), (a, l, k)


def test_nine_element_equal_l_k_is_vacuous():
    assert verify_lemma31(5, 3, 3)


# --- progressions and the pattern M_b -------------------------------------------------


def test_pattern_m_elements():
    p = PatternM(3, 2, 4)
    assert p.row(1) == [6, 36]
    assert len(p.elements) == 2 * 4 + 4
    assert {2, 4, 8, 16} <= p.elements
    with pytest.raises(ValueError):
        PatternM(1, 2, 3)


def test_monochromatic_ap_order():
    xi = [0, 1, 0, 1, 0, 1, 1, 1]
    assert _monochromatic_ap(xi, 3) == (6, 1)
    assert _monochromatic_ap(xi, 4) == (2, 2)
    assert _monochromatic_ap(xi, 5) is None
    assert _monochromatic_ap([0, 1, 2], 1) == (1, 1)


@settings(max_examples=100)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=30), st.integers(2, 6))
def test_monochromatic_ap_is_smallest(xi, length):
    found = _monochromatic_ap(xi, length)
    every = [
        (d, j0)
        for d in range(1, len(xi))
        for j0 in range(1, len(xi) + 1)
        if j0 + (length - 1) * d <= len(xi) and len({xi[j0 - 1 + t * d] for t in range(length)}) == 1
    ]
    assert found == (min(every)[::-1] if every else None)


@pytest.mark.parametrize(
    "exps, r, T", [((1, 1), 2, 1), ((1, 1), 3, 1), ((1, 2), 2, 1), ((1, 1, 1), 2, 9), ((1, 1, 2), 2, 13)]
)
def test_auxiliary_threshold(exps, r, T):
    # (1,1,1) asks for a 3-term progression: van der Waerden W(3, 2) = 9
    assert auxiliary_threshold(EquationSpec(exps), r) == T


def test_auxiliary_threshold_oracle():
    eq = EquationSpec((1, 1, 2))
    w, A = (1, 2), 3
    T = auxiliary_threshold(eq, 2)

    def has(word):
        n = len(word)
        return any(
            word[u - 1] == word[v - 1] == word[(w[0] * u + w[1] * v) // A - 1]
            for u in range(1, n + 1)
            for v in range(1, n + 1)
            if u != v and (u + 2 * v) % A == 0 and (u + 2 * v) // A <= n
        )

    assert all(has(word) for word in product((0, 1), repeat=T))
    assert not all(has(word) for word in product((0, 1), repeat=T - 1))


def test_case_one_constant_rows():
    b, S, W = 3, 3, 20
    pat = PatternM(b, S, W)
    cols = {e: 1 for e in pat.elements}
    out = find_in_pattern_M(b, S, W, cols, 2, outcome=True)
    assert out.case == 1 and (out.j0, out.d) == (1, 1)
    assert out.solution.xs == (6, 24) and out.solution.y == 144
    assert recheck_witness(XY, out.solution, b, cols, pat.elements) == []


def test_case_two_every_colour_in_row():
    b, S, W = 3, 3, 20
    pat = PatternM(b, S, W)
    rng = random.Random(5)
    cols = {}
    for j in range(1, W + 1):
        cols.update(zip(pat.row(j), (1, 2, 1)))
        cols[1 << j] = rng.randint(1, 2)
    out = find_in_pattern_M(b, S, W, cols, 2, outcome=True)
    assert out.case == 2
    assert recheck_witness(XY, out.solution, b, cols, pat.elements) == []


def test_general_case_two_internal_solution():
    eq = EquationSpec((1, 1, 1))
    b, S, W = 3, 2, 40
    pat = PatternM(b, S, W)
    rng = random.Random(11)
    for trial in range(30):
        cols = {}
        for j in range(1, W + 1):
            cols.update(zip(pat.row(j), (1, 2)))
            cols[1 << j] = rng.randint(1, 2)
        out = find_in_pattern_M_general(eq, b, S, W, cols, 2, outcome=True)
        assert out.case == 2 and out.solution is not None
        sol = out.solution
        assert recheck_witness(eq, sol, b, cols, pat.elements) == []
        step = 2
        exps = [x.bit_length() - 1 for x in sol.xs[1:]]
        assert all(1 << e == x for e, x in zip(exps, sol.xs[1:]))
        assert all(e % (step * out.d) == 0 for e in exps)
        us = [e // (step * out.d) for e in exps]
        assert len(set(us)) == len(us)
        # x2 x3 = y'^A with y' = 2^(step d v), v in [T]
        total = sum(eq.exponents[1:][i] * u for i, u in enumerate(us))
        assert total % 2 == 0 and 1 <= total // 2 <= 9


def test_finder_specialisation_agrees():
    b, S, W = 3, 2, 8
    pat = PatternM(b, S, W)
    rng = random.Random(3)
    for trial in range(200):
        cols = random_pattern_colouring(pat, 2, rng, "mixed", trial)
        assert find_in_pattern_M(b, S, W, cols, 2) == find_in_pattern_M_general(XY, b, S, W, cols, 2)


def test_short_grid_returns_none():
    b, S, W = 3, 5, 64
    pat = PatternM(b, S, W)
    cols = {e: 1 for e in pat.elements}
    # 1 + 5! = 121 rows would be needed
    assert find_in_pattern_M(b, S, W, cols, 2) is None
    assert find_in_pattern_M(b, S, W, cols, 2, outcome=True).case == 0


def test_finder_rejects_partial_colouring():
    pat = PatternM(3, 2, 8)
    cols = {e: 1 for e in pat.elements}
    cols.pop(2)
    with pytest.raises(ValueError):
        find_in_pattern_M(3, 2, 8, cols, 2)


@pytest.mark.parametrize(
    "exps, S, W, use_lcm",
    [((1, 1), 2, 8, False), ((1, 1), 3, 20, True), ((1, 2), 2, 8, False), ((1, 2), 3, 20, False), ((1, 1, 1), 2, 40, False)],
)
def test_soundness_sweep(exps, S, W, use_lcm):
    rep = pattern_soundness(EquationSpec(exps), 3, S, W, 2, trials=300, seed=7, use_lcm=use_lcm)
    assert rep.violations == []
    assert rep.returned > 0


def test_recheck_catches_bad_witnesses():
    pat = PatternM(3, 2, 8)
    cols = {e: 1 for e in pat.elements}
    cols[36] = 2
    assert recheck_witness(XY, MonoSolution((6, 6), 36, 1, True), 3, cols, pat.elements) == ["degenerate", "not monochromatic"]
    assert recheck_witness(XY, MonoSolution((2, 4), 8, 1, False), 3, cols, pat.elements) == ["divisibility"]
    assert recheck_witness(XY, MonoSolution((2, 6), 13, 1, False), 3, cols) == ["product identity", "divisibility", "uncoloured element"]
    assert recheck_witness(XY, MonoSolution((2, 9), 18, 1, False), 3, {2: 1, 9: 1, 18: 1}, pat.elements) == ["outside pattern"]


# --- minimiser ----------------------------------------------------------------------


def brute_minimum(exps, r, N):
    sols = []
    for xs in product(range(2, N + 1), repeat=len(exps)):
        y = 1
        for x, a in zip(xs, exps):
            y *= x ** a
        if y <= N:
            sols.append(xs + (y,))
    best = None
    for word in product(range(r), repeat=N - 1):
        m = sum(1 for s in sols if len({word[v - 2] for v in s}) == 1)
        if best is None or m < best:
            best = m
    return best


@pytest.mark.parametrize("r", [1, 2, 3])
def test_minimize_matches_enumeration(r):
    for N in range(2, 13):
        rep = minimize(XY, r, N)
        assert rep.minimum == brute_minimum((1, 1), r, N)
        assert count_solutions(CountQuery(XY, N, 2, rep.witness)).total == rep.minimum


@pytest.mark.parametrize("exps", [(1, 2), (1, 1, 1)])
def test_minimize_other_equations(exps):
    eq = EquationSpec(exps)
    for N in (8, 16, 24, 32):
        for r in (1, 2):
            if r == 2 and N > 20:
                continue
            rep = minimize(eq, r, N)
            assert rep.minimum == brute_minimum(exps, r, N)
            assert count_solutions(CountQuery(eq, N, 2, rep.witness)).total == rep.minimum


def test_minimize_boundary_values():
    assert minimize(XY, 2, 4).minimum == 0
    assert minimize(XY, 2, 31).minimum == 0
    rep = minimize(XY, 2, 32)
    assert rep.minimum == 1
    assert rep.participating == 26
    assert count_solutions(CountQuery(XY, 32, 2, rep.witness)).total == 1


def test_minimize_monotone():
    values = {r: [minimize(XY, r, N).minimum for N in range(2, 41)] for r in (1, 2, 3)}
    for r in values:
        assert values[r] == sorted(values[r])
    for N in range(39):
        assert values[1][N] >= values[2][N] >= values[3][N]


def test_minimize_budget():
    with pytest.raises(BudgetExceeded):
        minimize(XY, 2, 32, budget=20)
    with pytest.raises(ValueError):
        minimize(XY, 2, 1)


# --- stability -------------------------------------------------------------------------


def test_stability_examples():
    rep = stability_check(build_named("improved2", 10**4))
    assert (rep.M, rep.prefix_end, rep.status) == (173, 3, "pass")
    rep = stability_check(DiscreteColouring(2, 100, 2, [1] * 99))
    assert (rep.M, rep.prefix_end, rep.status) == (283, 0, "vacuous")
    rep = stability_check(build_omega(DiscreteColouring.from_sequence(1, [1, 2, 2, 1]), 31))
    assert rep.status == "not_applicable" and rep.ok
    with pytest.raises(ValueError):
        stability_check(build_named("schur3", 10**5))


@settings(max_examples=80, deadline=None)
@given(st.integers(4, 120), st.randoms(use_true_random=False))
def test_stability_report_matches_definition(N, rnd):
    # start from a solution-poor colouring so that every status shows up
    base = minimize(XY, 2, min(N, 40)).witness.key() + (1,) * max(0, N - 40)
    word = [c if rnd.random() > 0.05 else 3 - c for c in base]
    rep = stability_check(DiscreteColouring(2, N, 2, word))
    M = sum(1 for x in range(2, N + 1) for y in range(2, N // x + 1) if word[x - 2] == word[y - 2] == word[x * y - 2])
    assert rep.M == M
    if M == 0:
        assert rep.status == "not_applicable"
    elif N // (16 * M) < 3:
        assert rep.status == "vacuous"
    else:
        assert rep.status == ("pass" if len(set(word[: N // (16 * M) - 1])) == 1 else "fail")


def test_stability_random_colourings():
    rng = random.Random(1)
    N = 10**4
    statuses = {}
    for i in range(1000):
        if i % 2 == 0:
            arr = np.array([rng.randint(1, 2) for _ in range(N - 1)], dtype=np.uint8)
        else:
            # few long runs, then a handful of flipped cells
            arr = np.ones(N - 1, dtype=np.uint8)
            cuts = sorted(rng.sample(range(3, N), rng.randint(1, 6)))
            c, prev = rng.randint(1, 2), 2
            for x in cuts + [N + 1]:
                arr[prev - 2 : x - 2] = c
                c, prev = 3 - c, x
        rep = stability_check(DiscreteColouring(2, N, 2, arr))
        assert rep.ok, f"counterexample to prefix stability: trial {i}, {rep.as_dict()}"
        statuses[rep.status] = statuses.get(rep.status, 0) + 1
    assert sum(statuses.values()) == 1000
