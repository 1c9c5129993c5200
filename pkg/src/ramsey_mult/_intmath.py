"""Exact integer helpers: integer roots, power comparisons, set partitions."""

from __future__ import annotations

from math import factorial, isqrt
from typing import Iterator, List, Sequence, Tuple


def iroot(n: int, k: int) -> int:
    """Largest integer x >= 0 with x**k <= n."""
    if n < 0:
        raise ValueError("iroot of a negative number")
    if k < 1:
        raise ValueError("root index must be >= 1")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return isqrt(n)
    # float seed, then exact correction in both directions
    x = int(round(n ** (1.0 / k))) if n.bit_length() < 1000 else 1 << (n.bit_length() // k + 1)
    if x < 1:
        x = 1
    # Newton from above for huge inputs
    if n.bit_length() >= 1000:
        while True:
            y = ((k - 1) * x + n // x ** (k - 1)) // k
            if y >= x:
                break
            x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def ceil_root(n: int, k: int) -> int:
    """Smallest integer x >= 0 with x**k >= n."""
    x = iroot(n, k)
    return x if x ** k == n else x + 1


def floor_pow_boundary(N: int, p: int, q: int, s: int = 0) -> int:
    """Largest integer n with n**q * 2**s <= N**p, i.e. floor((N**p / 2**s)**(1/q))."""
    return iroot(N ** p >> s, q)


def set_partitions(items: Sequence[int]) -> Iterator[List[List[int]]]:
    """All set partitions of ``items`` (restricted-growth order)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def distinct_moebius_terms(exponents: Sequence[int]) -> List[Tuple[int, Tuple[int, ...]]]:
    """Inclusion-exclusion over the partition lattice for "all variables distinct".

    Returns (weight, merged exponents) pairs such that the number of tuples with
    pairwise distinct entries equals sum(weight * count(merged)), where count(merged)
    counts tuples constant on each block of the partition.
    """
    terms: dict = {}
    for part in set_partitions(range(len(exponents))):
        w = 1
        for block in part:
            w *= (-1) ** (len(block) - 1) * factorial(len(block) - 1)
        merged = tuple(sorted(sum(exponents[i] for i in block) for block in part))
        terms[merged] = terms.get(merged, 0) + w
    return sorted((w, m) for m, w in terms.items() if w)
