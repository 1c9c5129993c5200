"""Integer colourings of [2, N]: the named interval constructions, the logarithmic
lift of a real template, the Omega colouring and the real 2-colouring for Rado equations.

Interval boundaries have the form (N^p / 2^s)^(1/q) and are resolved with exact
integer roots; the first interval is closed at 2 and every later one is (u, v].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._intmath import ceil_root, floor_pow_boundary, iroot
from .core import DiscreteColouring, EquationSpec
from .real_intervals import Piece, RationalIntervalColouring

R, B, G, P = 1, 2, 3, 4

# breakpoints (p, q, s) meaning (N^p / 2^s)^(1/q), and the colour of each interval ending there
_Break = Tuple[int, int, int]
_NAMED: Dict[str, Tuple[int, List[_Break], List[int]]] = {
    "prendiville2": (2, [(1, 2, 0), (1, 1, 0)], [R, B]),
    "improved2": (2, [(1, 2, 1), (1, 1, 1), (1, 1, 0)], [R, B, R]),
    "prendiville3": (3, [(1, 4, 0), (1, 2, 0), (1, 1, 0)], [R, B, G]),
    "schur3": (3, [(1, 5, 0), (2, 5, 0), (4, 5, 0), (1, 1, 0)], [R, B, G, B]),
    "improved3": (
        3,
        [(1, 5, 4), (2, 5, 8), (2, 5, 3), (4, 5, 6), (4, 5, 1), (1, 1, 1), (1, 1, 0)],
        [R, B, R, G, R, B, R],
    ),
    "fourcolour_a": (
        4,
        [(j, 14, 0) for j in (1, 2, 4, 5, 10, 11, 13, 14)],
        [P, R, B, R, G, R, B, R],
    ),
    "fourcolour_b": (
        4,
        [(j, 14, 0) for j in (1, 2, 4, 5, 7, 8, 10, 11, 13, 14)],
        [P, R, B, R, G, R, G, R, B, R],
    ),
}

NAMED_CONSTRUCTIONS = tuple(_NAMED)


def named_runs(name: str, N: int) -> Tuple[int, List[Tuple[int, int, int]]]:
    """(r, runs) of a named construction without materialising the array; runs are (start, end, colour)."""
    if name not in _NAMED:
        raise ValueError(f"unknown construction {name!r}; choose from {', '.join(NAMED_CONSTRUCTIONS)}")
    r, breaks, colours = _NAMED[name]
    ends = [floor_pow_boundary(N, p, q, s) for p, q, s in breaks]
    runs = []
    start = 2
    for end, c in zip(ends, colours):
        if end < start:
            raise ValueError(f"{name}: N={N} is too small, an interval ending at {end} would be empty")
        runs.append((start, end, c))
        start = end + 1
    return r, runs


def runs_to_colouring(lo: int, hi: int, r: int, runs: Sequence[Tuple[int, int, int]]) -> DiscreteColouring:
    arr = np.zeros(hi - lo + 1, dtype=np.uint8)
    for s, e, c in runs:
        arr[s - lo : e - lo + 1] = c
    return DiscreteColouring(lo, hi, r, arr)


def build_named(name: str, N: int) -> DiscreteColouring:
    """Exact colouring of [2, N] for one of NAMED_CONSTRUCTIONS."""
    r, runs = named_runs(name, N)
    return runs_to_colouring(2, N, r, runs)


# --- logarithmic lift --------------------------------------------------------


@dataclass(frozen=True)
class LiftSpec:
    xi: RationalIntervalColouring
    N: int
    M: Optional[int] = None

    @property
    def T(self) -> Fraction:
        return self.xi.hi

    def threshold(self) -> int:
        """M if given, else the least integer with M^T >= N."""
        if self.M is not None:
            return self.M
        T = self.T
        return max(2, ceil_root(self.N ** T.denominator, T.numerator))


def _x_range(M: int, piece: Piece) -> Tuple[int, int]:
    """Integers x whose log_M x lies in the piece: M^lo <(=) x^q..., exact."""
    lo, hi = piece.lo, piece.hi
    # lower end: x^q > M^p (open) or x^q >= M^p (closed)
    base = M ** lo.numerator
    if piece.lo_closed:
        first = ceil_root(base, lo.denominator)
    else:
        first = iroot(base, lo.denominator) + 1
    base = M ** hi.numerator
    if piece.hi_closed:
        last = iroot(base, hi.denominator)
    else:
        last = ceil_root(base, hi.denominator) - 1
    return first, last


def lift(spec: LiftSpec) -> DiscreteColouring:
    """Colour r on [2, M]; x > M gets xi(log x / log M). Uses r = xi.r + 1 colours."""
    xi, N = spec.xi, spec.N
    M = spec.threshold()
    if M < 2:
        raise ValueError("lift threshold M must be >= 2")
    if xi.lo != 1 or xi.lo_closed:
        raise ValueError("lift templates must live on (1, T]")
    r = xi.r + 1
    runs = [(2, min(M, N), r)]
    covered = M
    for piece in xi.pieces:
        first, last = _x_range(M, piece)
        first = max(first, M + 1)
        last = min(last, N)
        if first <= last:
            if first != covered + 1:
                raise AssertionError("template pieces must tile (M, N]")
            runs.append((first, last, piece.colour))
            covered = last
        if covered >= N:
            break
    if covered < N:
        raise ValueError(f"template too short: {covered + 1} > M^T with M={M}, T={spec.T}")
    return runs_to_colouring(2, N, r, runs)


# --- Omega colouring ---------------------------------------------------------


def big_omega(n: int) -> int:
    """Number of prime factors of n counted with multiplicity (trial division)."""
    if n < 1:
        raise ValueError("big_omega needs n >= 1")
    count = 0
    d = 2
    while d * d <= n:
        while n % d == 0:
            n //= d
            count += 1
        d += 1 if d == 2 else 2
    return count + (n > 1)


def omega_table(N: int) -> np.ndarray:
    """Omega(x) for x in [0, N] by a prime-power sieve (entries 0 and 1 are 0)."""
    out = np.zeros(N + 1, dtype=np.int64)
    if N < 2:
        return out
    is_prime = np.ones(N + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(N ** 0.5) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    for p in np.flatnonzero(is_prime):
        q = int(p)
        while q <= N:
            out[q::q] += 1
            q *= int(p)
    return out


def build_omega(xi: DiscreteColouring, N: int) -> DiscreteColouring:
    """c(x) = xi(Omega(x)) on [2, N]; needs Omega(x) in xi's domain for every x <= N."""
    if N < 2:
        raise ValueError("N must be >= 2")
    om = omega_table(N)[2:]
    bad = np.flatnonzero((om < xi.lo) | (om > xi.hi))
    if bad.size:
        x = int(bad[0]) + 2
        raise ValueError(f"Omega({x}) = {big_omega(x)} lies outside [{xi.lo}, {xi.hi}]")
    return DiscreteColouring(2, N, xi.r, xi.colours[om - xi.lo])


# --- real 2-colouring for a1 x1 + ... + ak xk = y -----------------------------


def build_rado2_real(eq: EquationSpec) -> RationalIntervalColouring:
    """Colour 1 on [1, A) and [A^2, A^2 + A - 1), colour 2 on [A, A^2)."""
    if eq.exponents[0] != 1:
        raise ValueError("the real 2-colouring needs a1 = 1")
    A = eq.A
    return RationalIntervalColouring(
        [
            Piece(Fraction(1), Fraction(A), 1, True, False),
            Piece(Fraction(A), Fraction(A * A), 2, True, False),
            Piece(Fraction(A * A), Fraction(A * A + A - 1), 1, True, False),
        ],
        2,
    )


def template_from_word(word: Sequence[int], lo: int = 1) -> RationalIntervalColouring:
    """Template on (lo, lo + len] colouring (k, k+1] by word[k - lo], equal neighbours fused."""
    pieces: List[Piece] = []
    for i, c in enumerate(word):
        k = lo + i
        if pieces and pieces[-1].colour == c:
            prev = pieces.pop()
            pieces.append(Piece(prev.lo, Fraction(k + 1), c, False, True))
        else:
            pieces.append(Piece(Fraction(k), Fraction(k + 1), c, False, True))
    return RationalIntervalColouring(pieces)
