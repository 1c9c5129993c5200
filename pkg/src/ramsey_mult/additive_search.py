"""Exhaustive search for Schur, shifted Schur and Rado numbers.

Colour classes are kept as Python-int bitsets. For each colour we track the set of
values y = a1 x1 + ... + ak xk reachable from that class; an element n may take
colour c unless n is such a value (or one more than it, for the shifted systems).
Colours are introduced in order, so every colouring found is already canonical.

Determinism: the tree is split at a fixed depth; the first subtree runs first and
its best length seeds every other subtree. The same procedure runs whatever the
number of workers, so reports (node counts included) do not depend on ``jobs``.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from math import factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import DiscreteColouring, EquationSpec, canonical_key

KINDS = ("schur", "schur_star", "rado", "rado_star")
DEFAULT_SPLIT_DEPTH = 8
# S(5) and S*(5) are far beyond an exhaustive search of this kind
MAX_SCHUR_COLOURS = 4


class LimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class AdditiveSystem:
    kind: str
    eq: Optional[EquationSpec] = None

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        if kind not in KINDS:
            raise ValueError(f"unknown system {self.kind!r}; choose from {', '.join(KINDS)}")
        object.__setattr__(self, "kind", kind)
        if kind.startswith("schur"):
            if self.eq is not None and self.eq.exponents != (1, 1):
                raise ValueError("schur systems fix the equation x + y = z")
            object.__setattr__(self, "eq", EquationSpec((1, 1)))
        elif self.eq is None:
            raise ValueError("rado systems need an equation")
        else:
            self.eq.require_regular()

    @property
    def shifted(self) -> bool:
        return self.kind.endswith("_star")

    @property
    def weights(self) -> Tuple[int, ...]:
        return self.eq.exponents

    def label(self) -> str:
        return self.kind if self.kind.startswith("schur") else f"{self.kind}({self.eq.label()})"


@dataclass
class SearchReport:
    system: AdditiveSystem
    r: int
    threshold: int
    extremal_count: int
    extremals: Optional[List[DiscreteColouring]]
    nodes_visited: int
    raw_extremal_count: int = 0
    wall_time: float = field(default=0.0, compare=False)

    def as_dict(self, include_extremals: bool = True, timing: bool = False) -> dict:
        out = {
            "system": self.system.label(),
            "eq": list(self.system.eq.exponents),
            "colours": self.r,
            "threshold": self.threshold,
            "extremal_count": self.extremal_count,
            "raw_extremal_count": self.raw_extremal_count,
            "nodes_visited": self.nodes_visited,
        }
        if include_extremals and self.extremals is not None:
            out["extremals"] = [c.word() if c.r <= 4 else "".join(map(str, c.key())) for c in self.extremals]
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


# --- the kernel --------------------------------------------------------------


class _Kernel:
    """Depth-first colouring of 1, 2, 3, ... with incremental forbidden sets."""

    def __init__(self, system: AdditiveSystem, r: int, limit: int):
        self.r = r
        self.limit = limit
        self.full = (1 << (limit + 2)) - 1
        self.weights = system.weights
        self.shifted = system.shifted
        self.nodes = 0

    # state: colours (list), per-colour tuples masks / scaled / sums / forb
    def initial(self):
        r = self.r
        k = len(self.weights)
        distinct = sorted(set(self.weights))
        return {
            "colours": [],
            "used": 0,
            "scaled": [{a: 0 for a in distinct} for _ in range(r)],
            "members": [[] for _ in range(r)],
            "sums": [0] * r,
            "forb": [0] * r,
            "k": k,
        }

    def _new_sums(self, st, c: int, n: int) -> Tuple[int, Dict[int, int]]:
        w = self.weights
        full = self.full
        scaled = {a: (m | (1 << (a * n))) & full for a, m in st["scaled"][c].items()}
        if len(w) == 2:
            a1, a2 = w
            old = st["scaled"][c]
            add = (old[a2] << (a1 * n)) | (old[a1] << (a2 * n)) | (1 << ((a1 + a2) * n))
            return (st["sums"][c] | add) & full, scaled
        members = st["members"][c] + [n]
        acc = scaled[w[0]]
        for a in w[1:]:
            nxt = 0
            for x in members:
                if a * x > self.limit + 1:
                    break
                nxt |= acc << (a * x)
            acc = nxt & full
        return acc, scaled

    def push(self, st, c: int, n: int):
        """Colour n with c; returns an undo record."""
        sums, scaled = self._new_sums(st, c, n)
        undo = (c, st["sums"][c], st["forb"][c], st["scaled"][c], st["used"])
        st["sums"][c] = sums
        st["forb"][c] = (sums | (sums << 1)) & self.full if self.shifted else sums
        st["scaled"][c] = scaled
        st["members"][c].append(n)
        st["colours"].append(c)
        st["used"] = max(st["used"], c + 1)
        return undo

    def pop(self, st, undo) -> None:
        c, sums, forb, scaled, used = undo
        st["sums"][c], st["forb"][c], st["scaled"][c], st["used"] = sums, forb, scaled, used
        st["members"][c].pop()
        st["colours"].pop()

    def first_dead(self, st, n: int) -> Optional[int]:
        """Smallest m >= n forbidden in every colour (only possible once all r colours are used)."""
        if st["used"] < self.r:
            return None
        dead = self.full
        for f in st["forb"]:
            dead &= f
        dead >>= n
        if not dead:
            return None
        return n + (dead & -dead).bit_length() - 1

    def longest(self, st, best: int, split: Optional[int] = None, frontier: Optional[list] = None):
        """Max-length DFS. Returns (best, found) with found the colourings of length best.

        With ``split`` set, states reaching depth ``split`` are copied into frontier instead
        of being explored (and are not counted as found).
        """
        found: List[Tuple[int, ...]] = []
        r = self.r

        def rec(n: int) -> None:
            nonlocal best
            self.nodes += 1
            length = n - 1
            if split is not None and length == split:
                frontier.append(_snapshot(st))
                return
            if length > best:
                best = length
                found.clear()
            if length == best:
                found.append(tuple(st["colours"]))
            if length >= self.limit:
                raise LimitExceeded(f"threshold exceeds the limit {self.limit}")
            d = self.first_dead(st, n)
            if d is not None and d - 1 < best:
                return
            for c in range(min(st["used"] + 1, r)):
                if (st["forb"][c] >> n) & 1:
                    continue
                undo = self.push(st, c, n)
                rec(n + 1)
                self.pop(st, undo)

        rec(len(st["colours"]) + 1)
        return best, found

    def all_of_length(self, st, N: int) -> List[Tuple[int, ...]]:
        found: List[Tuple[int, ...]] = []
        r = self.r

        def rec(n: int) -> None:
            self.nodes += 1
            if n > N:
                found.append(tuple(st["colours"]))
                return
            d = self.first_dead(st, n)
            if d is not None and d <= N:
                return
            for c in range(min(st["used"] + 1, r)):
                if (st["forb"][c] >> n) & 1:
                    continue
                undo = self.push(st, c, n)
                rec(n + 1)
                self.pop(st, undo)

        rec(len(st["colours"]) + 1)
        return found


def _snapshot(st) -> dict:
    return {
        "colours": list(st["colours"]),
        "used": st["used"],
        "scaled": [dict(s) for s in st["scaled"]],
        "members": [list(m) for m in st["members"]],
        "sums": list(st["sums"]),
        "forb": list(st["forb"]),
        "k": st["k"],
    }


def _run_subtree(args) -> Tuple[int, List[Tuple[int, ...]], int]:
    system, r, limit, st, seed = args
    kern = _Kernel(system, r, limit)
    best, found = kern.longest(st, seed)
    return best, found, kern.nodes


def _resolve_jobs(jobs: Optional[int]) -> int:
    if jobs is None:
        env = os.environ.get("RAMSEY_MULT_JOBS")
        jobs = int(env) if env else (os.cpu_count() or 1)
    return max(1, jobs)


def _to_colouring(key: Sequence[int], r: int) -> DiscreteColouring:
    return DiscreteColouring(1, len(key), r, [c + 1 for c in key])


def _raw_count(keys: Iterable[Sequence[int]], r: int) -> int:
    """Number of colourings before quotienting by colour permutations."""
    return sum(factorial(r) // factorial(r - (max(k) + 1 if k else 0)) for k in keys)


def find_threshold(
    system: AdditiveSystem,
    r: int,
    limit: int = 200,
    *,
    keep_extremals: bool = True,
    jobs: Optional[int] = None,
    split_depth: int = DEFAULT_SPLIT_DEPTH,
    max_schur_colours: int = MAX_SCHUR_COLOURS,
) -> SearchReport:
    """Least N such that every r-colouring of [1, N] has a monochromatic solution."""
    if r < 1:
        raise ValueError("need at least one colour")
    if system.kind.startswith("schur") and r > max_schur_colours:
        raise ValueError(
            f"{system.label()} with {r} colours is out of desk-scale scope (limit {max_schur_colours} colours)"
        )
    if limit < 1:
        raise ValueError("limit must be >= 1")
    t0 = time.perf_counter()
    kern = _Kernel(system, r, limit)
    st = kern.initial()
    frontier: list = []
    best, found = kern.longest(st, 0, split=split_depth, frontier=frontier)
    nodes = kern.nodes
    results = []
    if frontier:
        first = _run_subtree((system, r, limit, frontier[0], best))
        results.append(first)
        seed = max(best, first[0])
        tasks = [(system, r, limit, s, seed) for s in frontier[1:]]
        workers = min(_resolve_jobs(jobs), len(tasks))
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results.extend(pool.map(_run_subtree, tasks))
        else:
            results.extend(map(_run_subtree, tasks))
    pool_best = max([best] + [b for b, _, _ in results])
    keys = set(found) if best == pool_best else set()
    for b, f, n in results:
        nodes += n
        if b == pool_best:
            keys.update(f)
    ordered = sorted(keys)
    return SearchReport(
        system,
        r,
        pool_best + 1,
        len(ordered),
        [_to_colouring(k, r) for k in ordered] if keep_extremals else None,
        nodes,
        _raw_count(ordered, r),
        time.perf_counter() - t0,
    )


def enumerate_extremals(system: AdditiveSystem, r: int, N: int) -> List[DiscreteColouring]:
    """Every solution-free r-colouring of [1, N], up to colour permutation, sorted."""
    if N < 1:
        raise ValueError("N must be >= 1")
    kern = _Kernel(system, r, N + 1)
    keys = kern.all_of_length(kern.initial(), N)
    return [_to_colouring(k, r) for k in sorted(keys)]


# --- independent checks ------------------------------------------------------


def system_solutions(system: AdditiveSystem, N: int) -> List[Tuple[int, ...]]:
    """All solution tuples (x1..xk, y) in [1, N], sorted; used by CNF export and re-checks."""
    w = system.weights
    shifts = (0, 1) if system.shifted else (0,)
    out = set()
    for xs in product(range(1, N + 1), repeat=len(w)):
        base = sum(a * x for a, x in zip(w, xs))
        for s in shifts:
            if base + s <= N:
                out.add(xs + (base + s,))
    return sorted(out)


def is_solution_free(system: AdditiveSystem, colouring: DiscreteColouring) -> bool:
    """Direct check on [1, hi], independent of the search kernel."""
    if colouring.lo != 1:
        raise ValueError("additive colourings start at 1")
    for sol in system_solutions(system, colouring.hi):
        if len({colouring[v] for v in sol}) == 1:
            return False
    return True


# (1-indexed) template for the 576 extremal shifted-Schur 4-colourings of [1, 40]
_T5_BLOCK = "RBBRGGxGGRBBR"
_T5_MIDDLE = "PPyPPzwstPPuPP"
_TEMPLATE_5 = _T5_BLOCK + _T5_MIDDLE + _T5_BLOCK.replace("x", "v")
_T5_FREE = {"x": "RG", "v": "RG", "y": "RP", "z": "RP", "t": "RP", "u": "RP", "w": "BGP", "s": "BGP"}
_LETTER = {"R": 1, "B": 2, "G": 3, "P": 4}


def template_5_size() -> int:
    size = 1
    for ch in _TEMPLATE_5:
        size *= len(_T5_FREE.get(ch, "?"))
    return size


def template_5_colourings() -> List[DiscreteColouring]:
    """All colourings described by the template, canonicalised and sorted."""
    slots = [i for i, ch in enumerate(_TEMPLATE_5) if ch in _T5_FREE]
    out = set()
    for choice in product(*(_T5_FREE[_TEMPLATE_5[i]] for i in slots)):
        word = list(_TEMPLATE_5)
        for i, ch in zip(slots, choice):
            word[i] = ch
        out.add(canonical_key([_LETTER[ch] for ch in word]))
    return [DiscreteColouring(1, 40, 4, k) for k in sorted(out)]


def matches_template_5(c: DiscreteColouring) -> bool:
    if (c.lo, c.hi) != (1, 40) or c.r != 4:
        raise ValueError("the template describes 4-colourings of [1, 40]")
    # the fixed positions 1, 2, 5, 14 carry R, B, G, P and pin the permutation
    sigma = {c[1]: "R", c[2]: "B", c[5]: "G", c[14]: "P"}
    if len(sigma) != 4:
        return False
    for i, ch in enumerate(_TEMPLATE_5, start=1):
        got = sigma[c[i]]
        if got not in _T5_FREE.get(ch, ch):
            return False
    return True


def check_template_5(colourings: Sequence[DiscreteColouring]) -> bool:
    return all(matches_template_5(c) for c in colourings)


@dataclass(frozen=True)
class InequalityCheck:
    r: int
    t: int
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def tight(self) -> bool:
        return self.lhs == self.rhs


def check_abbott_hanson(
    schur: Dict[int, int], schur_star: Dict[int, int], pairs: Sequence[Tuple[int, int]]
) -> List[InequalityCheck]:
    """S*(r+t) >= 2 S(r) S*(t) - S(r) - S*(t) + 1 for each requested (r, t)."""
    out = []
    for r, t in pairs:
        try:
            s, st, lhs = schur[r], schur_star[t], schur_star[r + t]
        except KeyError as exc:
            raise ValueError(f"missing value for index {exc.args[0]} in pair ({r}, {t})") from None
        out.append(InequalityCheck(r, t, lhs, 2 * s * st - s - st + 1))
    return out


# --- CNF ---------------------------------------------------------------------


def cnf_clauses(system: AdditiveSystem, r: int, N: int) -> Tuple[int, List[List[int]]]:
    """(variable count, clauses) with v(x, c) = (x - 1) r + c."""
    v = lambda x, c: (x - 1) * r + c  # noqa: E731
    clauses: List[List[int]] = []
    for x in range(1, N + 1):
        clauses.append([v(x, c) for c in range(1, r + 1)])
        for c in range(1, r + 1):
            for d in range(c + 1, r + 1):
                clauses.append([-v(x, c), -v(x, d)])
    patterns = sorted({tuple(sorted(set(sol))) for sol in system_solutions(system, N)})
    for pat in patterns:
        for c in range(1, r + 1):
            clauses.append([-v(x, c) for x in pat])
    return N * r, clauses


def export_cnf(system: AdditiveSystem, r: int, N: int, path: str) -> Tuple[int, int]:
    """Write DIMACS CNF; returns (variables, clauses)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    nvars, clauses = cnf_clauses(system, r, N)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"c {system.label()} r={r} N={N}; v(x,c) = (x-1)*{r} + c\n")
        fh.write(f"p cnf {nvars} {len(clauses)}\n")
        for cl in clauses:
            fh.write(" ".join(map(str, cl)) + " 0\n")
    return nvars, len(clauses)
