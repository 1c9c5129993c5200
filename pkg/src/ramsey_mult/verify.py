"""Executable checks: the nine-element pattern, the 2-power grid pattern finders,
an exact branch-and-bound minimiser for monochromatic counts, and the stability test.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from math import factorial, lcm
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .core import DiscreteColouring, EquationSpec, MonoSolution
from .counting import CountQuery, count_solutions, enumerate_solutions

# --- nine-element pattern ----------------------------------------------------


@dataclass(frozen=True)
class PatternT:
    a: int
    l: int  # noqa: E741
    k: int

    def __post_init__(self):
        if min(self.a, self.l, self.k) < 2:
            raise ValueError("a, l and k must all be >= 2")

    @property
    def elements(self) -> Tuple[int, ...]:
        a, l, k = self.a, self.l, self.k
        return (l, k, l * k, a, l * a, k * a, l * k * a, l * l * a, l * l * k * a)

    def side_conditions(self) -> bool:
        a, l, k = self.a, self.l, self.k
        return a not in (l, k, l * k) and k not in (l * a, l * l * a) and l != k * a


def verify_lemma31(a: int, l: int, k: int) -> bool:  # noqa: E741
    """Every 2-colouring of T with c(l) != c(k) has a monochromatic xy = z with a | z
    (and a non-degenerate one when the side conditions hold)."""
    pat = PatternT(a, l, k)
    if l == k:
        return True  # premise c(l) != c(k) cannot hold
    elems = sorted(set(pat.elements))
    index = {e: i for i, e in enumerate(elems)}
    triples = [
        (index[x], index[y], index[x * y])
        for x in elems
        for y in elems
        if x * y in index and (x * y) % a == 0
    ]
    distinct = [t for t in triples if len(set(t)) == 3]
    need_distinct = pat.side_conditions()
    il, ik = index[l], index[k]
    free = [i for i in range(len(elems)) if i not in (il, ik)]
    for bits in range(1 << len(free)):
        col = [0] * len(elems)
        col[ik] = 1
        for j, i in enumerate(free):
            col[i] = bits >> j & 1
        pool = distinct if need_distinct else triples
        if not any(col[x] == col[y] == col[z] for x, y, z in pool):
            return False
    return True


# --- the 2-power grid M_b ----------------------------------------------------


@dataclass(frozen=True)
class PatternM:
    b: int
    S: int
    W: int

    def __post_init__(self):
        if self.b < 2 or self.S < 1 or self.W < 1:
            raise ValueError("need b >= 2, S >= 1, W >= 1")
        if self.b % 2 == 1:
            assert len(self.elements) == self.S * self.W + self.W

    def row(self, j: int) -> List[int]:
        """The geometric progression (2^j b)^i, i = 1..S."""
        g = (1 << j) * self.b
        return [g ** i for i in range(1, self.S + 1)]

    @property
    def elements(self) -> frozenset:
        out = {1 << j for j in range(1, self.W + 1)}
        for j in range(1, self.W + 1):
            out.update(self.row(j))
        return frozenset(out)


@dataclass(frozen=True)
class FinderOutcome:
    solution: Optional[MonoSolution]
    case: int = 0  # 0: no progression found, 1 or 2: which branch produced the answer
    j0: int = 0
    d: int = 0


def _monochromatic_ap(xi: Sequence[tuple], length: int) -> Optional[Tuple[int, int]]:
    """Smallest d, then smallest j0, with xi constant on j0, j0+d, ..., j0+(length-1)d (1-based)."""
    W = len(xi)
    if length <= 1:
        return (1, 1) if W else None
    for d in range(1, (W - 1) // (length - 1) + 1):
        for j0 in range(1, W - (length - 1) * d + 1):
            v = xi[j0 - 1]
            if all(xi[j0 - 1 + t * d] == v for t in range(1, length)):
                return j0, d
    return None


def _xi(pat: PatternM, colour: Callable[[int], int]) -> List[tuple]:
    return [tuple(colour(x) for x in pat.row(j)) for j in range(1, pat.W + 1)]


def _as_lookup(colouring) -> Callable[[int], int]:
    if callable(colouring):
        return colouring
    return colouring.__getitem__


def _check_domain(pat: PatternM, colouring) -> None:
    if isinstance(colouring, Mapping):
        missing = pat.elements - set(colouring)
        if missing:
            raise ValueError(f"colouring misses {len(missing)} elements of the pattern, e.g. {min(missing)}")


def find_in_pattern_M(
    b: int, S: int, W: int, colouring, r: int, *, use_lcm: bool = False, outcome: bool = False
):
    """Follow the progression argument for xy = z on M_b.

    Returns a MonoSolution (monochromatic, x, y, z distinct, b | z) or None when no
    progression of the required length exists in [W] or the short row has no Schur triple.
    ``use_lcm`` replaces S! by lcm(1..S), which the argument equally supports.
    """
    return find_in_pattern_M_general(EquationSpec((1, 1)), b, S, W, colouring, r, use_lcm=use_lcm, outcome=outcome)


_T_CACHE: Dict[Tuple[Tuple[int, ...], int], int] = {}


def _aux_solutions(weights: Sequence[int], A: int, n: int) -> List[Tuple[Tuple[int, ...], int]]:
    """(u, v) in [1, n] with sum w_s u_s = A v, u pairwise distinct, max element n."""
    out = []
    for us in product(range(1, n + 1), repeat=len(weights)):
        if len(set(us)) < len(us):
            continue
        tot = sum(w * u for w, u in zip(weights, us))
        if tot % A == 0 and 1 <= tot // A <= n and max(max(us), tot // A) == n:
            out.append((us, tot // A))
    return out


def auxiliary_threshold(eq: EquationSpec, r: int, limit: int = 64) -> int:
    """Least T such that every r-colouring of [T] has same-coloured u_2..u_k (pairwise distinct)
    and v with a_2 u_2 + ... + a_k u_k = (a_2 + ... + a_k) v."""
    key = (eq.exponents, r)
    if key in _T_CACHE:
        return _T_CACHE[key]
    w = eq.exponents[1:]
    A = sum(w)
    sols: Dict[int, list] = {}
    colours: List[int] = []

    def extendable(n: int) -> bool:
        """Can colours[0:n-1] be extended to a valid colouring of [n]?"""
        if n > limit:
            raise ValueError(f"auxiliary threshold exceeds {limit}")
        for c in range(min(max(colours, default=-1) + 2, r)):
            colours.append(c)
            if n not in sols:
                sols[n] = _aux_solutions(w, A, n)
            ok = all(len({colours[u - 1] for u in us} | {colours[v - 1]}) > 1 for us, v in sols[n])
            if ok and (n == target or extendable(n + 1)):
                colours.pop()
                return True
            colours.pop()
        return False

    target = 1
    while True:
        if not extendable(1):
            _T_CACHE[key] = target
            return target
        target += 1


def find_in_pattern_M_general(
    eq: EquationSpec, b: int, S: int, W: int, colouring, r: int, *, use_lcm: bool = False, outcome: bool = False
):
    """Progression argument for x1^a1 ... xk^ak = y on M_b (a1 = 1).

    Returns a MonoSolution (monochromatic, x's pairwise distinct, b | y) or None.
    """
    eq.require_regular()
    pat = PatternM(b, S, W)
    _check_domain(pat, colouring)
    col = _as_lookup(colouring)
    w = eq.exponents  # ascending, so w[0] == 1
    k = len(w)
    A = sum(w[1:])
    T = auxiliary_threshold(eq, r)
    step = lcm(*range(1, S + 1)) if use_lcm else factorial(S)
    xi = _xi(pat, col)
    found = _monochromatic_ap(xi, 1 + A * T * step)
    if found is None:
        res = FinderOutcome(None)
        return res if outcome else None
    j0, d = found
    pattern = xi[j0 - 1]

    def g(j: int) -> int:
        return (1 << j) * b

    if len(set(pattern)) <= r - 1:
        # a solution inside the row: exponents i_1..i_k with sum a_s i_s = t <= S
        for idx in product(range(1, S + 1), repeat=k):
            t = sum(a * i for a, i in zip(w, idx))
            if t > S:
                continue
            if len({pattern[i - 1] for i in idx} | {pattern[t - 1]}) != 1:
                continue
            # spread repeated entries along the progression
            hs: List[int] = []
            xs: List[int] = []
            for i in idx:
                h = 0
                while g(j0 + d * t * h) ** i in xs:
                    h += 1
                hs.append(h)
                xs.append(g(j0 + d * t * h) ** i)
            mu = sum(a * h * i for a, h, i in zip(w, hs, idx))
            y = g(j0 + mu * d) ** t
            sol = MonoSolution(tuple(xs), y, pattern[t - 1], False)
            res = FinderOutcome(sol, 1, j0, d)
            return res if outcome else sol
        res = FinderOutcome(None, 1, j0, d)
        return res if outcome else None

    # every colour shows up in row j0: solve the auxiliary equation on 2^(step d j), j <= T
    pw = lambda j: 1 << (step * d * j)  # noqa: E731
    for us in product(range(1, T + 1), repeat=k - 1):
        if len(set(us)) < len(us):
            continue
        tot = sum(a * u for a, u in zip(w[1:], us))
        if tot % A or not 1 <= tot // A <= T:
            continue
        v = tot // A
        c = col(pw(v))
        if any(col(pw(u)) != c for u in us):
            continue
        if c not in pattern:
            continue
        i = pattern.index(c) + 1
        x1 = g(j0) ** i
        y = g(j0 + (step // i) * v * A * d) ** i
        sol = MonoSolution((x1,) + tuple(pw(u) for u in us), y, c, False)
        res = FinderOutcome(sol, 2, j0, d)
        return res if outcome else sol
    res = FinderOutcome(None, 2, j0, d)
    return res if outcome else None


def recheck_witness(eq: EquationSpec, sol: MonoSolution, b: int, colouring, elements: Optional[Iterable[int]] = None) -> List[str]:
    """Independent re-verification; returns the list of violated properties (empty when sound)."""
    col = _as_lookup(colouring)
    problems = []
    if eq.value(sol.xs) != sol.y:
        problems.append("product identity")
    if len(set(sol.xs)) != len(sol.xs):
        problems.append("degenerate")
    if sol.y % b:
        problems.append("divisibility")
    if elements is not None:
        pool = set(elements)
        if not set(sol.elements()) <= pool:
            problems.append("outside pattern")
    try:
        if len({col(v) for v in sol.elements()}) != 1:
            problems.append("not monochromatic")
    except (KeyError, IndexError):
        problems.append("uncoloured element")
    return problems


# --- exact minimiser ---------------------------------------------------------


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class MinimizeReport:
    N: int
    r: int
    eq: EquationSpec
    minimum: int
    witness: DiscreteColouring
    nodes: int
    participating: int
    wall_time: float = field(default=0.0, compare=False)

    def as_dict(self, timing: bool = False) -> dict:
        out = {
            "N": self.N,
            "colours": self.r,
            "eq": list(self.eq.exponents),
            "minimum": self.minimum,
            "witness": "".join(map(str, self.witness.key())),
            "nodes": self.nodes,
            "participating": self.participating,
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


def _solution_sets(eq: EquationSpec, N: int) -> Dict[Tuple[int, ...], int]:
    """Distinct element sets of solution tuples in [2, N] with their multiplicities."""
    sets: Dict[Tuple[int, ...], int] = {}
    for s in enumerate_solutions(CountQuery(eq, N)):
        key = tuple(sorted(set(s.elements())))
        sets[key] = sets.get(key, 0) + 1
    return sets


def minimize(eq: EquationSpec, r: int, N: int, budget: int = 48) -> MinimizeReport:
    """Exact minimum number of monochromatic solutions over all r-colourings of [2, N]."""
    if N < 2:
        raise ValueError("N must be >= 2")
    if r < 1:
        raise ValueError("need at least one colour")
    t0 = time.perf_counter()
    sets = _solution_sets(eq, N) if N >= 2 ** eq.A else {}
    weight: Dict[int, int] = {}
    for s, m in sets.items():
        for e in s:
            weight[e] = weight.get(e, 0) + m
    order = sorted(weight, key=lambda e: (-weight[e], e))
    n = len(order)
    if n > budget:
        raise BudgetExceeded(f"{n} participating elements exceed the budget of {budget}")
    pos = {e: i for i, e in enumerate(order)}
    # each set is settled when its last element (in branching order) is coloured
    closing: List[List[Tuple[Tuple[int, ...], int]]] = [[] for _ in range(n)]
    second: List[List[Tuple[int, Tuple[int, ...], int]]] = [[] for _ in range(n)]
    for s, m in sets.items():
        ps = sorted(pos[e] for e in s)
        others = tuple(ps[:-1])
        closing[ps[-1]].append((others, m))
        # once position ps[-2] is coloured, the set only waits on ps[-1]
        second[ps[-2]].append((ps[-1], others, m))

    assign = [-1] * n
    best = [None, None]  # cost, assignment
    nodes = 0

    def cost_at(p: int, c: int) -> int:
        return sum(m for others, m in closing[p] if all(assign[o] == c for o in others))

    def lower_bound(p: int) -> int:
        """Sum over uncoloured q > p of the cheapest forced cost of colouring q."""
        pend: Dict[int, List[int]] = {}
        for q in range(p + 1):
            for last, others, m in second[q]:
                if last > p:
                    c = assign[others[0]]
                    if all(assign[o] == c for o in others):
                        pend.setdefault(last, [0] * r)[c] += m
        return sum(min(v) for v in pend.values())

    # greedy incumbent
    used = 0
    for p in range(n):
        options = range(min(used + 1, r))
        c = min(options, key=lambda c: cost_at(p, c))
        assign[p] = c
        used = max(used, c + 1)
    best[0] = sum(cost_at(p, assign[p]) for p in range(n))
    best[1] = list(assign)
    assign = [-1] * n

    def rec(p: int, cost: int, used: int) -> None:
        nonlocal nodes
        nodes += 1
        if p == n:
            if cost < best[0]:
                best[0], best[1] = cost, list(assign)
            return
        if best[0] == 0:
            return
        opts = sorted(
            ((cost_at(p, c), c) for c in range(min(used + 1, r))),
        )
        for add, c in opts:
            if cost + add >= best[0]:
                break
            assign[p] = c
            if cost + add + lower_bound(p) < best[0]:
                rec(p + 1, cost + add, max(used, c + 1))
            assign[p] = -1

    if n:
        rec(0, 0, 0)
    colours = [1] * (N - 1)
    for p, e in enumerate(order):
        colours[e - 2] = best[1][p] + 1
    witness = DiscreteColouring(2, N, r, colours)
    return MinimizeReport(N, r, eq, best[0], witness, nodes, n, time.perf_counter() - t0)


# --- stability ---------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    N: int
    M: int
    prefix_end: int
    status: str  # "pass", "fail", "vacuous" or "not_applicable"

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def as_dict(self) -> dict:
        return {"N": self.N, "M": self.M, "prefix_end": self.prefix_end, "status": self.status}


def stability_check(colouring: DiscreteColouring) -> StabilityReport:
    """With M monochromatic xy = z solutions in [2, N], is [2, N // (16 M)] monochromatic?"""
    if colouring.r != 2:
        raise ValueError(f"stability applies to 2-colourings, got r={colouring.r}")
    if colouring.lo != 2:
        raise ValueError("stability expects a colouring of [2, N]")
    N = colouring.hi
    M = count_solutions(CountQuery(EquationSpec((1, 1)), N, 2, colouring)).total if N >= 4 else 0
    if M == 0:
        return StabilityReport(N, 0, 0, "not_applicable")
    end = N // (16 * M)
    if end < 3:
        return StabilityReport(N, M, end, "vacuous")
    prefix = colouring.colours[: end - 1]
    return StabilityReport(N, M, end, "pass" if (prefix == prefix[0]).all() else "fail")


# --- seeded colourings of M_b ------------------------------------------------

PATTERN_MODES = ("random", "structured", "perturbed", "mixed")


def random_pattern_colouring(pat: PatternM, r: int, rng, mode: str = "mixed", trial: int = 0) -> Dict[int, int]:
    """Colouring of M_b drawn from ``rng`` (a random.Random).

    random: every element independent. structured: colour depends on the exponent i only,
    so every row looks alike and long progressions exist. perturbed: structured with three
    random cells changed. mixed cycles through the three by trial number.
    """
    if mode == "mixed":
        mode = PATTERN_MODES[trial % 3]
    if mode not in PATTERN_MODES:
        raise ValueError(f"unknown colouring mode {mode!r}")
    cols: Dict[int, int] = {}
    if mode == "random":
        for e in sorted(pat.elements):
            cols[e] = rng.randint(1, r)
        return cols
    f = [rng.randint(1, r) for _ in range(pat.S)]
    for j in range(1, pat.W + 1):
        for i, x in enumerate(pat.row(j)):
            cols[x] = f[i]
    for j in range(1, pat.W + 1):
        cols[1 << j] = rng.randint(1, r)
    if mode == "perturbed":
        for _ in range(3):
            j = rng.randint(1, pat.W)
            i = rng.randrange(pat.S)
            cols[pat.row(j)[i]] = rng.randint(1, r)
    return cols


@dataclass
class SoundnessReport:
    trials: int
    returned: int
    violations: List[Tuple[int, List[str]]]
    cases: Dict[int, int]

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "returned": self.returned,
            "violations": [{"trial": t, "problems": p} for t, p in self.violations],
            "cases": {str(k): v for k, v in sorted(self.cases.items())},
        }


def pattern_soundness(
    eq: EquationSpec, b: int, S: int, W: int, r: int, trials: int, seed: int, mode: str = "mixed", use_lcm: bool = False
) -> SoundnessReport:
    """Run the finder on seeded colourings and re-verify every returned witness."""
    import random

    rng = random.Random(seed)
    pat = PatternM(b, S, W)
    elements = pat.elements
    returned = 0
    violations = []
    cases: Dict[int, int] = {}
    for trial in range(trials):
        cols = random_pattern_colouring(pat, r, rng, mode, trial)
        out = find_in_pattern_M_general(eq, b, S, W, cols, r, use_lcm=use_lcm, outcome=True)
        cases[out.case] = cases.get(out.case, 0) + 1
        if out.solution is not None:
            returned += 1
            problems = recheck_witness(eq, out.solution, b, cols, elements)
            if problems:
                violations.append((trial, problems))
    return SoundnessReport(trials, returned, violations, cases)
