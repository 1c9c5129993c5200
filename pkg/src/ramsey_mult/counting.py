"""Exact counting of (monochromatic) solutions to x1^a1 ... xk^ak = y on integer intervals.

Solutions are ordered tuples (x1, ..., xk) with every xi and y in [lo, hi].
Several exact routes are provided and must agree:

* ``enumerate``: the lexicographic generator, one tuple at a time;
* ``formula``: floor-division recursion (hyperbola method for xy = z), no colouring;
* ``runs``: box counting over the constant runs of an interval colouring;
* ``dense``: numpy-vectorised enumeration for arbitrary colourings.

Non-degenerate counts come from inclusion-exclusion over set partitions of the
variables (tuples constant on blocks are counted with merged exponents).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import factorial, isqrt
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ._intmath import distinct_moebius_terms, iroot
from .core import CountReport, DiscreteColouring, EquationSpec, MonoSolution

_INT64_SAFE = 1 << 62
# interval colourings with at most this many runs are counted by the box method
RUNS_THRESHOLD = 64


@dataclass(frozen=True)
class CountQuery:
    eq: EquationSpec
    hi: int
    lo: int = 2
    colouring: Optional[DiscreteColouring] = None
    non_degenerate_only: bool = False

    def validate(self) -> None:
        if self.lo < 2:
            raise ValueError(f"solution domain must start at lo >= 2, got {self.lo}")
        if self.hi < self.lo:
            raise ValueError(f"empty domain [{self.lo}, {self.hi}]")
        c = self.colouring
        if c is not None and (self.lo < c.lo or self.hi > c.hi):
            raise ValueError(f"colouring covers [{c.lo}, {c.hi}] but the query needs [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class AsymptoticConstant:
    eq: EquationSpec
    value: float
    m: int


def divisor_count(n: int) -> int:
    """Number of positive divisors of n, by trial division up to sqrt(n)."""
    if n < 1:
        raise ValueError("divisor_count needs n >= 1")
    count = 0
    r = isqrt(n)
    for d in range(1, r + 1):
        if n % d == 0:
            count += 2
    if r * r == n:
        count -= 1
    return count


# --- enumeration -------------------------------------------------------------


def enumerate_solutions(q: CountQuery) -> Iterator[MonoSolution]:
    """Yield every solution tuple in lexicographic order of (x1, ..., xk)."""
    q.validate()
    exps = q.eq.exponents
    k = len(exps)
    lo, hi = q.lo, q.hi
    col = q.colouring
    tails = [lo ** sum(exps[i + 1 :]) for i in range(k)]
    xs: List[int] = []

    def rec(i: int, partial: int, colour: Optional[int]) -> Iterator[MonoSolution]:
        a = exps[i]
        x = lo
        while partial * x ** a * tails[i] <= hi:
            cx = col[x] if col is not None else None
            if colour is None or cx == colour:
                xs.append(x)
                val = partial * x ** a
                if i + 1 == k:
                    degenerate = len(set(xs)) < k
                    if (not degenerate or not q.non_degenerate_only) and (col is None or col[val] == cx):
                        yield MonoSolution(tuple(xs), val, cx, degenerate)
                else:
                    yield from rec(i + 1, val, cx)
                xs.pop()
            x += 1

    yield from rec(0, 1, None)


# --- uncoloured counting -----------------------------------------------------


def _sum_floor_div(V: int, a: int, b: int) -> int:
    """sum of V // x for x in [a, b] (a >= 1)."""
    if b < a:
        return 0
    total = 0
    if V < _INT64_SAFE:
        # below sqrt(V) the quotients are mostly distinct: vectorise in chunks
        dense_end = min(b, isqrt(V))
        for start in range(a, dense_end + 1, 1 << 20):
            stop = min(dense_end, start + (1 << 20) - 1)
            total += int(np.sum(V // np.arange(start, stop + 1, dtype=np.int64)))
        a = max(a, dense_end + 1)
    x = a
    while x <= b:
        qv = V // x
        if qv == 0:
            break
        x2 = min(V // qv, b)
        total += qv * (x2 - x + 1)
        x = x2 + 1
    return total


def _hyperbola(V: int, lo: int) -> int:
    """#{(x, y) : x, y >= lo, x*y <= V}."""
    s = isqrt(V)
    if s < lo:
        return 0
    n = s - lo + 1
    return 2 * (_sum_floor_div(V, lo, s) - (lo - 1) * n) - n * n


@lru_cache(maxsize=1 << 16)
def _count_le(exps: Tuple[int, ...], V: int, lo: int) -> int:
    """#{(x1..xk) : xi >= lo, prod xi^ai <= V}; exps sorted ascending."""
    if V < lo ** sum(exps):
        return 0
    if len(exps) == 1:
        return iroot(V, exps[0]) - lo + 1
    if exps == (1, 1):
        return _hyperbola(V, lo)
    a, rest = exps[-1], exps[:-1]
    xmax = iroot(V // lo ** sum(rest), a)
    total = 0
    x = lo
    if a == 1:
        while x <= xmax:
            qv = V // x
            x2 = min(V // qv, xmax)
            total += (x2 - x + 1) * _count_le(rest, qv, lo)
            x = x2 + 1
    else:
        for x in range(lo, xmax + 1):
            total += _count_le(rest, V // x ** a, lo)
    return total


def count_tuples(exps: Sequence[int], lo: int, hi: int) -> int:
    """Uncoloured count of ordered tuples with all xi, y in [lo, hi]."""
    exps = tuple(sorted(exps))
    if lo < 1:
        raise ValueError("lo must be >= 1")
    if lo == 1:
        raise ValueError("use count_full_range for domains containing 1")
    return _count_le(exps, hi, lo)


def count_full_range(eq: EquationSpec, X: int) -> int:
    """Number of solutions with all variables in [X] = {1, ..., X} (including 1)."""
    if X < 1:
        raise ValueError("X must be >= 1")
    exps = eq.exponents
    total = 0
    for mask in range(1 << len(exps)):
        sub = tuple(a for i, a in enumerate(exps) if mask >> i & 1)
        total += 1 if not sub else (_count_le(sub, X, 2) if X >= 2 else 0)
    return total


# --- coloured counting -------------------------------------------------------


def _box_le(exps: Tuple[int, ...], boxes: Tuple[Tuple[int, int], ...], V: int) -> int:
    """#{x in prod(boxes) : prod xi^ai <= V}."""
    if V < 1:
        return 0
    if len(exps) == 1:
        l, u = boxes[0]
        top = min(u, iroot(V, exps[0]))
        return max(0, top - l + 1)
    if exps == (1, 1):
        (l1, u1), (l2, u2) = boxes
        xmax = min(u1, V // l2)
        if xmax < l1:
            return 0
        full_to = min(xmax, V // u2)  # V // x >= u2 here
        total = max(0, full_to - l1 + 1) * (u2 - l2 + 1)
        start = max(l1, full_to + 1)
        if start <= xmax:
            total += _sum_floor_div(V, start, xmax) - (l2 - 1) * (xmax - start + 1)
        return total
    a, rest = exps[-1], exps[:-1]
    l, u = boxes[-1]
    rest_boxes = boxes[:-1]
    rest_min = 1
    for (bl, _), e in zip(rest_boxes, rest):
        rest_min *= bl ** e
    xmax = min(u, iroot(V // rest_min, a))
    total = 0
    x = l
    if a == 1:
        while x <= xmax:
            qv = V // x
            x2 = min(V // qv, xmax)
            total += (x2 - x + 1) * _box_le(rest, rest_boxes, qv)
            x = x2 + 1
    else:
        for x in range(l, xmax + 1):
            total += _box_le(rest, rest_boxes, V // x ** a)
    return total


def _mono_counts_runs(
    exps: Tuple[int, ...], runs: Sequence[Tuple[int, int, int]], r: int, hi: int
) -> Dict[int, int]:
    """Per-colour monochromatic tuple counts for an interval colouring given by runs."""
    by_colour: Dict[int, List[Tuple[int, int]]] = {c: [] for c in range(1, r + 1)}
    for s, e, c in runs:
        by_colour[c].append((s, e))
    out: Dict[int, int] = {}
    k = len(exps)
    for c, rs in by_colour.items():
        total = 0
        for combo in product(rs, repeat=k):
            low = 1
            for (bl, _), a in zip(combo, exps):
                low *= bl ** a
            if low > hi:
                continue
            for ys, ye in rs:
                if ye < low:
                    continue
                total += _box_le(exps, combo, min(ye, hi)) - _box_le(exps, combo, ys - 1)
        out[c] = total
    return out


def _mono_counts_dense(
    exps: Tuple[int, ...], col: np.ndarray, lo: int, hi: int, r: int
) -> Dict[int, int]:
    """Per-colour monochromatic tuple counts by vectorised enumeration; col[i] is the colour of lo+i."""
    if hi >= _INT64_SAFE:
        raise ValueError("dense counting limited to hi < 2**62")
    counts = np.zeros(r + 1, dtype=np.int64)
    col = col.astype(np.int64)
    if len(exps) == 1:
        a = exps[0]
        top = iroot(hi, a)
        if top >= lo:
            xs = np.arange(lo, top + 1, dtype=np.int64)
            ys = xs ** a
            cx = col[xs - lo]
            keep = cx == col[ys - lo]
            counts += np.bincount(cx[keep], minlength=r + 1)
        return {c: int(counts[c]) for c in range(1, r + 1)}

    # the two smallest exponents are vectorised; larger ones form the outer prefix
    a1, a2 = exps[0], exps[1]
    outer = exps[2:]

    def tally(u: np.ndarray, v: np.ndarray, p: int, c0: Optional[int]) -> None:
        y = p * u ** a1 * v ** a2
        cu = col[u - lo]
        keep = (cu == col[v - lo]) & (cu == col[y - lo])
        if c0 is not None:
            keep &= cu == c0
        counts[:] += np.bincount(cu[keep], minlength=r + 1)

    def pairs(p: int, c0: Optional[int]) -> None:
        B = hi // p
        if B < lo ** (a1 + a2):
            return
        t = iroot(B, a1 + a2)
        for u in range(lo, t + 1):
            vmax = iroot(B // u ** a1, a2)
            if vmax >= lo:
                tally(np.full(vmax - lo + 1, u, dtype=np.int64), np.arange(lo, vmax + 1, dtype=np.int64), p, c0)
        vtop = iroot(B // (t + 1) ** a1, a2)
        for v in range(lo, vtop + 1):
            umax = iroot(B // v ** a2, a1)
            if umax > t:
                tally(np.arange(t + 1, umax + 1, dtype=np.int64), np.full(umax - t, v, dtype=np.int64), p, c0)

    pair_min = lo ** (a1 + a2)

    def prefix(i: int, p: int, c0: Optional[int]) -> None:
        if i == len(outer):
            pairs(p, c0)
            return
        a = outer[i]
        tail = pair_min * lo ** sum(outer[i + 1 :])
        x = lo
        while p * x ** a * tail <= hi:
            cx = int(col[x - lo])
            if c0 is None or cx == c0:
                prefix(i + 1, p * x ** a, cx)
            x += 1

    prefix(0, 1, None)
    return {c: int(counts[c]) for c in range(1, r + 1)}


def _combine_distinct(exps: Tuple[int, ...], counter) -> Tuple[Dict[int, int], Dict[int, int]]:
    """Run ``counter(merged_exps)`` for the plain and all merged systems; return (totals, distinct)."""
    totals = counter(exps)
    distinct: Dict[int, int] = {c: 0 for c in totals}
    for w, merged in distinct_moebius_terms(exps):
        part = totals if merged == exps else counter(merged)
        for c, v in part.items():
            distinct[c] += w * v
    return totals, distinct


def count_solutions(q: CountQuery, method: str = "auto") -> CountReport:
    """Exact solution counts; with a colouring only monochromatic tuples are counted.

    ``method`` selects the route: auto, formula, runs, dense or enumerate.
    """
    q.validate()
    exps = q.eq.exponents
    col = q.colouring
    if method not in ("auto", "formula", "runs", "dense", "enumerate"):
        raise ValueError(f"unknown counting method {method!r}")

    if method == "enumerate":
        per: Dict[int, List[int]] = {}
        total = nondeg = 0
        for s in enumerate_solutions(CountQuery(q.eq, q.hi, q.lo, col)):
            total += 1
            nondeg += not s.degenerate
            if col is not None:
                slot = per.setdefault(s.colour, [0, 0])
                slot[0] += 1
                slot[1] += not s.degenerate
        per_colour = {}
        if col is not None:
            per_colour = {c: tuple(per.get(c, [0, 0])) for c in range(1, col.r + 1)}
        if q.non_degenerate_only:
            total = nondeg
            per_colour = {c: (n, n) for c, (_, n) in per_colour.items()}
        return CountReport(total, nondeg, per_colour)

    if col is None:
        if method not in ("auto", "formula"):
            raise ValueError(f"method {method!r} needs a colouring")
        totals, distinct = _combine_distinct(exps, lambda e: {0: _count_le(e, q.hi, q.lo)})
        total, nondeg = totals[0], distinct[0]
        return CountReport(nondeg if q.non_degenerate_only else total, nondeg, {})

    if method == "formula":
        raise ValueError("the formula route counts uncoloured solutions only")
    sub = col if (col.lo, col.hi) == (q.lo, q.hi) else col.restrict(q.lo, q.hi)
    if method == "auto":
        runs = sub.runs()
        method = "runs" if len(runs) <= RUNS_THRESHOLD or q.hi >= _INT64_SAFE else "dense"
    if method == "runs":
        runs = sub.runs()
        counter = lambda e: _mono_counts_runs(e, runs, sub.r, q.hi)  # noqa: E731
    else:
        arr = sub.colours
        counter = lambda e: _mono_counts_dense(e, arr, q.lo, q.hi, sub.r)  # noqa: E731
    totals, distinct = _combine_distinct(exps, counter)
    per_colour = {c: (totals[c], distinct[c]) for c in sorted(totals)}
    nondeg = sum(distinct.values())
    if q.non_degenerate_only:
        per_colour = {c: (n, n) for c, (_, n) in per_colour.items()}
        return CountReport(nondeg, nondeg, per_colour)
    return CountReport(sum(totals.values()), nondeg, per_colour)


def count_runs(eq: EquationSpec, runs: Sequence[Tuple[int, int, int]], r: int) -> CountReport:
    """Monochromatic counts for an interval colouring given only by its runs (start, end, colour).

    The runs must tile [lo, hi] with lo >= 2; nothing is materialised, so hi may be huge.
    """
    runs = sorted(runs)
    lo, hi = runs[0][0], runs[-1][1]
    if lo < 2:
        raise ValueError("runs must start at 2 or later")
    for (_, e, _), (s, _, _) in zip(runs, runs[1:]):
        if s != e + 1:
            raise ValueError("runs must tile an interval")
    exps = eq.exponents
    totals, distinct = _combine_distinct(exps, lambda e: _mono_counts_runs(e, runs, r, hi))
    per_colour = {c: (totals[c], distinct[c]) for c in sorted(totals)}
    return CountReport(sum(totals.values()), sum(distinct.values()), per_colour)


def count_mono(eq: EquationSpec, colouring: DiscreteColouring, lo: int = 2, hi: Optional[int] = None) -> int:
    """Total number of monochromatic solutions (degenerate included)."""
    hi = colouring.hi if hi is None else hi
    return count_solutions(CountQuery(eq, hi, max(lo, colouring.lo), colouring)).total


# --- asymptotics -------------------------------------------------------------

# Bernoulli numbers B_2, B_4, ..., B_16 for the Euler-Maclaurin tail
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)


def zeta(s: int, terms: int = 16) -> float:
    """Riemann zeta at an integer s >= 2 (direct sum plus Euler-Maclaurin tail)."""
    if s < 2:
        raise ValueError("zeta(s) diverges for s <= 1")
    n = terms
    head = sum(j ** -float(s) for j in range(n - 1, 0, -1))
    tail = n ** (1.0 - s) / (s - 1) + 0.5 * n ** -float(s)
    rising = float(s)  # s (s+1) ... (s + 2j - 2)
    fact = 2.0  # (2j)!
    for j, b in enumerate(_BERNOULLI, start=1):
        tail += b / fact * rising * n ** (-s - 2 * j + 1.0)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return head + tail


def asymptotic_constant(eq: EquationSpec) -> AsymptoticConstant:
    """Leading constant C(a) of the count over [X]: zeta(a_{m+1})...zeta(a_k) / (m-1)!."""
    m = eq.m
    if m == 0:
        raise ValueError("asymptotic constant needs at least one exponent equal to 1")
    value = 1.0
    for a in eq.exponents[m:]:
        value *= zeta(a)
    return AsymptoticConstant(eq, value / factorial(m - 1), m)
