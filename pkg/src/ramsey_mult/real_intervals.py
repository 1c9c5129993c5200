"""Exact rational verification of real-interval colourings.

A colouring is a contiguous list of pieces with Fraction endpoints and explicit
closedness flags. ``check_sumfree`` decides whether same-coloured reals
x1..xk, y with a1 x1 + ... + ak xk = y exist, using weighted Minkowski sums of
pieces. No floating point is used anywhere on the decision path.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .core import DiscreteColouring, EquationSpec

Rat = Union[int, str, Fraction]


def _frac(v: Rat) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("boolean is not a rational endpoint")
    if isinstance(v, (int, str)):
        return Fraction(v)
    raise TypeError(f"endpoint {v!r} must be an int, a 'p/q' string or a Fraction")


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    colour: int
    lo_closed: bool = False
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", _frac(self.lo))
        object.__setattr__(self, "hi", _frac(self.hi))
        if self.colour < 1:
            raise ValueError("colours are 1-based")
        if self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed)):
            raise ValueError(f"empty piece {self}")

    def __contains__(self, x) -> bool:
        x = _frac(x)
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def __str__(self) -> str:
        return f"{'[' if self.lo_closed else '('}{_fmt(self.lo)}, {_fmt(self.hi)}{']' if self.hi_closed else ')'}->{self.colour}"

    def as_dict(self) -> dict:
        return {
            "lo": _fmt(self.lo),
            "hi": _fmt(self.hi),
            "colour": self.colour,
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }


class RationalIntervalColouring:
    """Contiguous pieces covering one real interval; pieces meet with complementary closedness."""

    def __init__(self, pieces: Iterable[Piece], r: Optional[int] = None):
        pieces = tuple(pieces)
        if not pieces:
            raise ValueError("a colouring needs at least one piece")
        for left, right in zip(pieces, pieces[1:]):
            if left.hi != right.lo:
                raise ValueError(f"gap or overlap between {left} and {right}")
            if left.hi_closed == right.lo_closed:
                raise ValueError(f"pieces {left} and {right} must meet with complementary closedness")
        used = max(p.colour for p in pieces)
        if r is None:
            r = used
        elif used > r:
            raise ValueError(f"colour {used} exceeds r={r}")
        self.pieces = pieces
        self.r = r

    @property
    def lo(self) -> Fraction:
        return self.pieces[0].lo

    @property
    def hi(self) -> Fraction:
        return self.pieces[-1].hi

    @property
    def lo_closed(self) -> bool:
        return self.pieces[0].lo_closed

    @property
    def hi_closed(self) -> bool:
        return self.pieces[-1].hi_closed

    def domain(self) -> str:
        return f"{'[' if self.lo_closed else '('}{_fmt(self.lo)}, {_fmt(self.hi)}{']' if self.hi_closed else ')'}"

    def colour_of(self, x: Rat) -> int:
        for p in self.pieces:
            if x in p:
                return p.colour
        raise ValueError(f"{x} outside {self.domain()}")

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalIntervalColouring) and (self.pieces, self.r) == (other.pieces, other.r)

    def __repr__(self) -> str:
        return f"RationalIntervalColouring({', '.join(map(str, self.pieces))}; r={self.r})"

    def to_json(self) -> list:
        return [p.as_dict() for p in self.pieces]

    @classmethod
    def from_json(cls, data, r: Optional[int] = None) -> "RationalIntervalColouring":
        """Accepts a list of {lo, hi, colour[, lo_closed, hi_closed]} or {"pieces": [...], "r": r}.

        Missing closedness flags default to the left-open, right-closed convention.
        """
        if isinstance(data, dict):
            r = data.get("r", r)
            data = data["pieces"]
        pieces = []
        for i, item in enumerate(data):
            try:
                pieces.append(
                    Piece(
                        _frac(item["lo"]),
                        _frac(item["hi"]),
                        int(item["colour"]),
                        bool(item.get("lo_closed", False)),
                        bool(item.get("hi_closed", True)),
                    )
                )
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"template piece {i}: {exc}") from None
        return cls(pieces, r)


def load_template(path: str) -> RationalIntervalColouring:
    with open(path, "r", encoding="utf-8") as fh:
        return RationalIntervalColouring.from_json(json.load(fh))


def save_template(col: RationalIntervalColouring, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"pieces": col.to_json(), "r": col.r}, fh, sort_keys=True, indent=2)
        fh.write("\n")


# (lo, lo_closed, hi, hi_closed)
_Span = Tuple[Fraction, bool, Fraction, bool]


def _minkowski(spans: Sequence[_Span], weights: Sequence[int]) -> _Span:
    lo = sum((w * s[0] for s, w in zip(spans, weights)), Fraction(0))
    hi = sum((w * s[2] for s, w in zip(spans, weights)), Fraction(0))
    return lo, all(s[1] for s in spans), hi, all(s[3] for s in spans)


def _intersect(a: _Span, b: _Span) -> Optional[_Span]:
    if a[0] > b[0]:
        lo, lc = a[0], a[1]
    elif b[0] > a[0]:
        lo, lc = b[0], b[1]
    else:
        lo, lc = a[0], a[1] and b[1]
    if a[2] < b[2]:
        hi, hc = a[2], a[3]
    elif b[2] < a[2]:
        hi, hc = b[2], b[3]
    else:
        hi, hc = a[2], a[3] and b[3]
    if lo < hi or (lo == hi and lc and hc):
        return lo, lc, hi, hc
    return None


def _witness(spans: Sequence[_Span], weights: Sequence[int], target: _Span) -> Tuple[Fraction, ...]:
    """Exact x1..xk, y with y in target and sum w_i x_i = y, each x_i in spans[i]."""
    total = _minkowski(spans, weights)
    y = target[0] if target[0] == target[2] else (target[0] + target[2]) / 2
    width = total[2] - total[0]
    t = Fraction(0) if width == 0 else (y - total[0]) / width
    xs = tuple(s[0] + t * (s[2] - s[0]) for s in spans)
    return xs + (y,)


@dataclass(frozen=True)
class SumfreeResult:
    free: bool
    witness: Optional[Tuple[Fraction, ...]] = None
    colour: Optional[int] = None

    def __bool__(self) -> bool:
        return self.free


def check_sumfree(col: RationalIntervalColouring, eq: EquationSpec, shifts: Sequence[int] = (0,)) -> SumfreeResult:
    """Decide whether a1 x1 + ... + ak xk + s = y has a monochromatic real solution (s in shifts)."""
    weights = eq.exponents
    k = len(weights)
    for colour in range(1, col.r + 1):
        spans = [(p.lo, p.lo_closed, p.hi, p.hi_closed) for p in col.pieces if p.colour == colour]
        for xs in product(spans, repeat=k):
            total = _minkowski(xs, weights)
            for s in shifts:
                shifted = (total[0] + s, total[1], total[2] + s, total[3])
                if shifted[0] > spans[-1][2]:
                    continue
                for ys in spans:
                    hit = _intersect(shifted, ys)
                    if hit is not None:
                        w = _witness(xs, weights, (hit[0] - s, hit[1], hit[2] - s, hit[3]))
                        return SumfreeResult(False, w[:-1] + (w[-1] + s,), colour)
    return SumfreeResult(True)


def floor_extend(xi: DiscreteColouring) -> RationalIntervalColouring:
    """Colour [k, k+1) by xi(k): a colouring of [lo, hi+1)."""
    return RationalIntervalColouring(
        [Piece(Fraction(k), Fraction(k + 1), xi[k], True, False) for k in range(xi.lo, xi.hi + 1)], xi.r
    )


def ceil_extend(xi: DiscreteColouring) -> RationalIntervalColouring:
    """Colour (k, k+1] by xi(k): a colouring of (lo, hi+1]."""
    return RationalIntervalColouring(
        [Piece(Fraction(k), Fraction(k + 1), xi[k], False, True) for k in range(xi.lo, xi.hi + 1)], xi.r
    )


def merge_pieces(col: RationalIntervalColouring) -> RationalIntervalColouring:
    """Fuse neighbouring pieces of equal colour."""
    out: List[Piece] = []
    for p in col.pieces:
        if out and out[-1].colour == p.colour:
            q = out.pop()
            p = Piece(q.lo, p.hi, p.colour, q.lo_closed, p.hi_closed)
        out.append(p)
    return RationalIntervalColouring(out, col.r)


def _record_digest(body: dict) -> str:
    return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def certify_interval_lower_bound(
    kind: str, eq: Optional[EquationSpec], r: int, col: RationalIntervalColouring
) -> dict:
    """Check a colouring and emit a re-verifiable lower-bound record.

    kind "schur" means x + y = z; kind "rado" uses eq. On success the record states
    that every T below the colouring's right endpoint admits a solution-free r-colouring.
    """
    if kind == "schur":
        eq = EquationSpec((1, 1))
    elif kind != "rado" or eq is None:
        raise ValueError(f"unknown certificate kind {kind!r} (or missing equation)")
    if col.r > r:
        raise ValueError(f"colouring uses {col.r} colours, more than r={r}")
    res = check_sumfree(col, eq)
    body = {
        "kind": kind,
        "eq": list(eq.exponents),
        "r": r,
        "T": _fmt(col.hi),
        "domain": col.domain(),
        "colouring": col.to_json(),
        "verified": res.free,
        "witness": None if res.free else [_fmt(v) for v in res.witness],
    }
    body["digest"] = _record_digest(body)
    return body


def verify_certificate(record: dict) -> bool:
    """Recheck a record from scratch: digest, colour bound and freeness all must agree."""
    body = {k: v for k, v in record.items() if k != "digest"}
    if record.get("digest") != _record_digest(body):
        return False
    col = RationalIntervalColouring.from_json(record["colouring"])
    if col.r > record["r"] or _fmt(col.hi) != record["T"]:
        return False
    res = check_sumfree(col, EquationSpec(tuple(record["eq"])))
    return res.free == record["verified"] and res.free
