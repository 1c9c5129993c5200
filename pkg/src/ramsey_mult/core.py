"""Shared value types and the colouring text format."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

# letters with a fixed meaning; any other letter is ranked after these
FIXED_LETTERS = "RBGP"
DIGITS = "123456789"


class ColouringFormatError(ValueError):
    """Malformed colouring text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class EquationSpec:
    """Exponent vector for x1^a1 ... xk^ak = y (and a1 x1 + ... + ak xk = y)."""

    exponents: Tuple[int, ...]

    def __post_init__(self):
        exps = tuple(sorted(int(a) for a in self.exponents))
        if len(exps) < 2:
            raise ValueError("an equation needs at least two variables")
        if exps[0] < 1:
            raise ValueError("exponents must be positive integers")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def parse(cls, text: str) -> "EquationSpec":
        try:
            return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))
        except ValueError as exc:
            raise ValueError(f"bad exponent list {text!r}: {exc}") from None

    @property
    def k(self) -> int:
        return len(self.exponents)

    @property
    def m(self) -> int:
        """Number of exponents equal to 1."""
        return sum(1 for a in self.exponents if a == 1)

    @property
    def A(self) -> int:
        """Sum of all exponents."""
        return sum(self.exponents)

    @property
    def partition_regular(self) -> bool:
        return self.m >= 1

    def require_regular(self) -> None:
        if not self.partition_regular:
            raise ValueError(f"equation {self.label()} has no exponent equal to 1 (not partition regular)")

    def value(self, xs: Sequence[int]) -> int:
        return prod(x ** a for x, a in zip(xs, self.exponents))

    def label(self) -> str:
        return ",".join(map(str, self.exponents))


class DiscreteColouring:
    """Total map from the integer interval [lo, hi] to colours 1..r.

    Stored densely as a read-only uint8 array; instances are treated as values.
    """

    __slots__ = ("lo", "hi", "r", "_colours")

    def __init__(self, lo: int, hi: int, r: int, colours: Iterable[int]):
        arr = np.array(colours if not isinstance(colours, np.ndarray) else colours, dtype=np.uint8)
        if lo < 1:
            raise ValueError("colourings start at lo >= 1")
        if hi < lo:
            raise ValueError("empty interval")
        if not 1 <= r <= 255:
            raise ValueError("r must be in 1..255")
        if arr.ndim != 1 or arr.shape[0] != hi - lo + 1:
            raise ValueError(f"expected {hi - lo + 1} colours, got {arr.shape[0] if arr.ndim == 1 else arr.shape}")
        if arr.size and (int(arr.min()) < 1 or int(arr.max()) > r):
            raise ValueError(f"colour entries must lie in 1..{r}")
        arr.setflags(write=False)
        self.lo, self.hi, self.r = int(lo), int(hi), int(r)
        self._colours = arr

    @classmethod
    def from_sequence(cls, lo: int, seq: Sequence[int], r: Optional[int] = None) -> "DiscreteColouring":
        seq = list(seq)
        return cls(lo, lo + len(seq) - 1, r if r is not None else max(seq), seq)

    @property
    def colours(self) -> np.ndarray:
        return self._colours

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __getitem__(self, x: int) -> int:
        if not self.lo <= x <= self.hi:
            raise IndexError(f"{x} outside [{self.lo}, {self.hi}]")
        return int(self._colours[x - self.lo])

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteColouring):
            return NotImplemented
        return (self.lo, self.hi, self.r) == (other.lo, other.hi, other.r) and np.array_equal(
            self._colours, other._colours
        )

    def __hash__(self) -> int:
        return hash((self.lo, self.hi, self.r, self._colours.tobytes()))

    def __repr__(self) -> str:
        body = self.word() if len(self) <= 60 else f"{len(self)} entries"
        return f"DiscreteColouring([{self.lo}, {self.hi}], r={self.r}, {body})"

    def key(self) -> Tuple[int, ...]:
        return tuple(int(c) for c in self._colours)

    def word(self) -> str:
        """Letter form (R, B, G, P, ...) for small r; digits otherwise."""
        if self.r <= len(FIXED_LETTERS):
            return "".join(FIXED_LETTERS[c - 1] for c in self._colours)
        return "".join(str(c) for c in self._colours)

    def restrict(self, lo: int, hi: int) -> "DiscreteColouring":
        if lo < self.lo or hi > self.hi:
            raise ValueError(f"[{lo}, {hi}] not inside [{self.lo}, {self.hi}]")
        return DiscreteColouring(lo, hi, self.r, self._colours[lo - self.lo : hi - self.lo + 1])

    def runs(self) -> List[Tuple[int, int, int]]:
        """Maximal constant runs as (start, end, colour), inclusive."""
        c = self._colours
        cuts = np.flatnonzero(c[1:] != c[:-1]) + 1
        starts = np.concatenate(([0], cuts))
        ends = np.concatenate((cuts - 1, [c.shape[0] - 1]))
        return [(int(s) + self.lo, int(e) + self.lo, int(c[s])) for s, e in zip(starts, ends)]

    def used_colours(self) -> List[int]:
        return sorted(int(v) for v in np.unique(self._colours))


@dataclass(frozen=True)
class MonoSolution:
    """Witness tuple (x1..xk, y) sharing one colour."""

    xs: Tuple[int, ...]
    y: int
    colour: Optional[int] = None
    degenerate: bool = field(default=False)

    @classmethod
    def make(cls, eq: EquationSpec, xs: Sequence[int], colour: Optional[int] = None) -> "MonoSolution":
        xs = tuple(int(x) for x in xs)
        return cls(xs, eq.value(xs), colour, len(set(xs)) < len(xs))

    def holds(self, eq: EquationSpec) -> bool:
        return len(self.xs) == eq.k and eq.value(self.xs) == self.y

    def elements(self) -> Tuple[int, ...]:
        return self.xs + (self.y,)


@dataclass(frozen=True)
class CountReport:
    total: int
    non_degenerate: int
    per_colour: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "non_degenerate": self.non_degenerate,
            "per_colour": {str(c): {"total": t, "non_degenerate": n} for c, (t, n) in sorted(self.per_colour.items())},
        }


def canonicalize(c: DiscreteColouring) -> DiscreteColouring:
    """Rename colours so that first occurrences read 1, 2, 3, ..."""
    arr = c.colours
    _, first = np.unique(arr, return_index=True)
    order = arr[np.sort(first)]
    table = np.zeros(256, dtype=np.uint8)
    table[order] = np.arange(1, len(order) + 1, dtype=np.uint8)
    return DiscreteColouring(c.lo, c.hi, c.r, table[arr])


def canonical_key(seq: Sequence[int]) -> Tuple[int, ...]:
    """First-occurrence relabelling of a plain colour sequence."""
    names: Dict[int, int] = {}
    return tuple(names.setdefault(v, len(names) + 1) for v in seq)


def _letter_table(letters: Iterable[str]) -> Dict[str, int]:
    present = set(letters)
    if present <= set(FIXED_LETTERS):
        return {ch: FIXED_LETTERS.index(ch) + 1 for ch in present}
    ranked = [ch for ch in FIXED_LETTERS if ch in present] + sorted(present - set(FIXED_LETTERS))
    return {ch: i + 1 for i, ch in enumerate(ranked)}


def parse_colouring(text: str) -> DiscreteColouring:
    """Parse the two-line "lo hi r" / colour-word format."""
    lines = text.replace("\r\n", "\n").split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if len(lines) != 2:
        raise ColouringFormatError(f"expected 2 lines, found {len(lines)}", 3 if len(lines) > 2 else len(lines) + 1, 1)
    header = lines[0].split(" ")
    if len(header) != 3 or not all(h.isdigit() for h in header):
        raise ColouringFormatError("header must be 'lo hi r' in decimal", 1, 1)
    lo, hi, r = (int(h) for h in header)
    if lo < 1 or hi < lo:
        raise ColouringFormatError(f"need 1 <= lo <= hi, got lo={lo} hi={hi}", 1, 1)
    if not 1 <= r <= 255:
        raise ColouringFormatError(f"colour count {r} out of range", 1, len(header[0]) + len(header[1]) + 3)
    word = lines[1]
    if len(word) != hi - lo + 1:
        raise ColouringFormatError(f"length mismatch: expected {hi - lo + 1} entries, got {len(word)}", 2, len(word) + 1)
    if all(ch in DIGITS for ch in word):
        values = [int(ch) for ch in word]
    elif all(ch.isalpha() and ch.isupper() for ch in word):
        table = _letter_table(word)
        values = [table[ch] for ch in word]
    else:
        # either a foreign character or digits mixed with letters
        first_is_digit = word[0] in DIGITS
        bad = next(
            i
            for i, ch in enumerate(word)
            if not (ch in DIGITS or (ch.isalpha() and ch.isupper())) or (ch in DIGITS) != first_is_digit
        )
        raise ColouringFormatError(f"unexpected character {word[bad]!r}", 2, bad + 1)
    for i, v in enumerate(values):
        if v > r:
            raise ColouringFormatError(f"entry {word[i]!r} maps to colour {v} > r={r}", 2, i + 1)
    return DiscreteColouring(lo, hi, r, values)


def format_colouring(c: DiscreteColouring) -> str:
    """Digit-form serialisation; inverse of parse_colouring."""
    if c.r > 9:
        raise ValueError("text format supports at most 9 colours")
    return f"{c.lo} {c.hi} {c.r}\n" + "".join(str(int(v)) for v in c.colours) + "\n"


def read_colouring(path: str) -> DiscreteColouring:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_colouring(fh.read())


def write_colouring(c: DiscreteColouring, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_colouring(c))
