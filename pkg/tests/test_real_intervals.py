from __future__ import annotations

import json
import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramsey_mult.additive_search import AdditiveSystem, is_solution_free
from ramsey_mult.constructions import build_rado2_real, template_from_word
from ramsey_mult.core import DiscreteColouring, EquationSpec
from ramsey_mult.real_intervals import (
    Piece,
    RationalIntervalColouring,
    certify_interval_lower_bound,
    ceil_extend,
    check_sumfree,
    floor_extend,
    load_template,
    merge_pieces,
    save_template,
    verify_certificate,
)

XY = EquationSpec((1, 1))
F = Fraction

WORD_41 = "RBBRGGGGGRBBR" + "P" * 14 + "RBBRGGGGGRBBR"


def word_colouring(word):
    letters = {"R": 1, "B": 2, "G": 3, "P": 4}
    return [letters[ch] for ch in word]


def check_witness(col, eq, res, shifts=(0,)):
    *xs, y = res.witness
    colours = {col.colour_of(v) for v in res.witness}
    assert colours == {res.colour}
    assert any(sum(a * x for a, x in zip(eq.exponents, xs)) + s == y for s in shifts)


# --- examples ---------------------------------------------------------------------


def test_half_open_unit_interval_is_free():
    col = RationalIntervalColouring([Piece(1, 2, 1, True, False)])
    assert check_sumfree(col, XY).free


def test_closed_unit_interval_gives_1_1_2():
    col = RationalIntervalColouring([Piece(1, 2, 1, True, True)])
    res = check_sumfree(col, XY)
    assert not res
    assert res.witness == (1, 1, 2)
    assert res.colour == 1


def test_rado2_real_is_free():
    for exps in [(1, 1), (1, 2), (1, 3), (1, 1, 1), (1, 1, 2)]:
        eq = EquationSpec(exps)
        col = build_rado2_real(eq)
        assert check_sumfree(col, eq).free
        assert col.hi == eq.A ** 2 + eq.A - 1


def test_rado2_real_breaks_when_stretched():
    # closing the right end at 11 admits 9 + 2 * 1 = 11
    eq = EquationSpec((1, 2))
    base = build_rado2_real(eq)
    pieces = list(base.pieces[:-1]) + [Piece(9, 11, 1, True, True)]
    res = check_sumfree(RationalIntervalColouring(pieces), eq)
    assert not res
    check_witness(RationalIntervalColouring(pieces), eq, res)


def test_floor_extend_rbbr():
    col = floor_extend(DiscreteColouring.from_sequence(1, [1, 2, 2, 1]))
    assert [str(p) for p in col.pieces] == ["[1, 2)->1", "[2, 3)->2", "[3, 4)->2", "[4, 5)->1"]
    assert col.domain() == "[1, 5)"
    assert check_sumfree(col, XY).free
    merged = merge_pieces(col)
    assert [str(p) for p in merged.pieces] == ["[1, 2)->1", "[2, 4)->2", "[4, 5)->1"]
    assert check_sumfree(merged, XY).free


def test_floor_extend_single_element():
    col = floor_extend(DiscreteColouring.from_sequence(1, [1]))
    assert len(col.pieces) == 1


@pytest.mark.parametrize("x", ["G", "R"])
def test_fourteen_colourings_free(x):
    word = "RBBRGG" + x + "GGRBBR"
    xi = DiscreteColouring.from_sequence(1, word_colouring(word), 3)
    assert check_sumfree(floor_extend(xi), XY).free
    assert check_sumfree(ceil_extend(xi), XY).free


def test_fourteen_with_blue_middle_fails():
    xi = DiscreteColouring.from_sequence(1, word_colouring("RBBRGGBGGRBBR"), 3)
    res = check_sumfree(ceil_extend(xi), XY)
    assert not res and res.colour == 2
    check_witness(ceil_extend(xi), XY, res)


def test_forty_one_colouring_free():
    col = template_from_word(word_colouring(WORD_41))
    assert col.domain() == "(1, 41]"
    assert len(col.pieces) == 15
    assert check_sumfree(col, XY).free


def test_shifts_detect_x_plus_y_plus_one():
    # RBBR on [1, 5) avoids x + y = z but x + y + 1 with x, y in [1, 2) lands in red [4, 5) once shifted
    col = floor_extend(DiscreteColouring.from_sequence(1, [1, 2, 2, 1], 2))
    assert check_sumfree(col, XY).free
    res = check_sumfree(col, XY, shifts=(0, 1))
    assert not res
    check_witness(col, XY, res, shifts=(0, 1))


# --- oracle equivalence ---------------------------------------------------------


def random_half_grid_colouring(rng):
    """Pieces with half-integer endpoints starting at 1, random closedness, up to 3 colours."""
    r = rng.randint(1, 3)
    cuts = [F(2)]
    for _ in range(rng.randint(0, 5)):
        cuts.append(cuts[-1] + F(rng.randint(1, 4), 2))
    pieces = []
    closed_lo = rng.random() < 0.5
    lo = F(1)
    for hi in cuts:
        closed_hi = rng.random() < 0.5
        pieces.append(Piece(lo, hi, rng.randint(1, r), closed_lo, closed_hi))
        lo, closed_lo = hi, not closed_hi
    return RationalIntervalColouring(pieces, r)


def grid_has_solution(col, den=12):
    pts = {}
    lo, hi = col.lo, col.hi
    n = int(lo * den)
    while F(n, den) <= hi:
        x = F(n, den)
        try:
            pts[x] = col.colour_of(x)
        except ValueError:
            pass
        n += 1
    return any(pts.get(x + y) == c == pts[y] for x, c in pts.items() for y in pts if y >= x)


def test_agrees_with_grid_brute_force():
    rng = random.Random(2024)
    seen = {True: 0, False: 0}
    for _ in range(200):
        col = random_half_grid_colouring(rng)
        res = check_sumfree(col, XY)
        assert res.free == (not grid_has_solution(col))
        if not res.free:
            check_witness(col, XY, res)
        seen[res.free] += 1
    assert min(seen.values()) > 10


def _words(n, r):
    for length in range(1, n + 1):
        yield from product(range(1, r + 1), repeat=length)


def test_floor_extension_free_iff_shifted_free():
    star = AdditiveSystem("schur_star")
    for word in _words(6, 2):
        xi = DiscreteColouring.from_sequence(1, word, 2)
        expected = is_solution_free(star, xi)
        assert check_sumfree(floor_extend(xi), XY).free == expected
        assert check_sumfree(ceil_extend(xi), XY).free == expected


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=9))
def test_floor_extension_iff_three_colours(word):
    xi = DiscreteColouring.from_sequence(1, word, 3)
    assert check_sumfree(floor_extend(xi), XY).free == is_solution_free(AdditiveSystem("schur_star"), xi)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 2), min_size=1, max_size=12), st.sampled_from([(1, 2), (1, 1, 1), (1, 3)]))
def test_floor_extension_rado_matches_integer_shifts(word, exps):
    # a1 x1 + ... + ak xk = y on [k, k+1) pieces: floors satisfy sum a_i k_i + s = k_y, 0 <= s < A
    eq = EquationSpec(exps)
    xi = DiscreteColouring.from_sequence(1, word, 2)
    col = floor_extend(xi)
    shifted_free = True
    for c in (1, 2):
        vals = [k for k in range(1, len(word) + 1) if xi[k] == c]
        for xs in product(vals, repeat=len(exps)):
            base = sum(a * x for a, x in zip(exps, xs))
            if any(base + s in vals for s in range(eq.A)):
                shifted_free = False
    assert check_sumfree(col, eq).free == shifted_free


# --- certificates -----------------------------------------------------------------


def test_certificate_rbbr():
    col = ceil_extend(DiscreteColouring.from_sequence(1, [1, 2, 2, 1]))
    rec = certify_interval_lower_bound("schur", None, 2, col)
    assert rec["verified"] and rec["T"] == "5" and rec["domain"] == "(1, 5]"
    assert rec["witness"] is None
    assert verify_certificate(rec)
    assert verify_certificate(json.loads(json.dumps(rec)))


def test_certificate_forty_one_and_rado():
    rec = certify_interval_lower_bound("schur", None, 4, template_from_word(word_colouring(WORD_41)))
    assert rec["verified"] and rec["T"] == "41" and verify_certificate(rec)
    eq = EquationSpec((1, 2))
    rec = certify_interval_lower_bound("rado", eq, 2, build_rado2_real(eq))
    assert rec["verified"] and rec["T"] == "11" and rec["eq"] == [1, 2]
    assert verify_certificate(rec)


def test_certificate_failure_and_tampering():
    bad = RationalIntervalColouring([Piece(1, 2, 1, True, True)])
    rec = certify_interval_lower_bound("schur", None, 1, bad)
    assert not rec["verified"]
    assert rec["witness"] == ["1", "1", "2"]
    assert not verify_certificate(rec)

    good = certify_interval_lower_bound("schur", None, 2, ceil_extend(DiscreteColouring.from_sequence(1, [1, 2, 2, 1])))
    forged = dict(good, T="6")
    assert not verify_certificate(forged)
    # a consistent digest cannot hide a false claim either
    from ramsey_mult.real_intervals import _record_digest

    lie = {k: v for k, v in rec.items() if k != "digest"}
    lie.update(verified=True, witness=None)
    lie["digest"] = _record_digest(lie)
    assert not verify_certificate(lie)


def test_certificate_errors():
    col = ceil_extend(DiscreteColouring.from_sequence(1, [1, 2, 2, 1]))
    with pytest.raises(ValueError):
        certify_interval_lower_bound("schur", None, 1, col)
    with pytest.raises(ValueError):
        certify_interval_lower_bound("rado", None, 2, col)
    with pytest.raises(ValueError):
        certify_interval_lower_bound("vdw", None, 2, col)


# --- structure and JSON ---------------------------------------------------------


def test_piece_membership():
    p = Piece("1/2", 2, 1, False, True)
    assert F(1, 2) not in p and 2 in p and "3/4" in p and 3 not in p
    with pytest.raises(ValueError):
        Piece(2, 1, 1)
    with pytest.raises(ValueError):
        Piece(1, 1, 1, False, True)
    assert 1 in Piece(1, 1, 1, True, True)


def test_colouring_validation():
    with pytest.raises(ValueError):
        RationalIntervalColouring([Piece(1, 2, 1), Piece(3, 4, 1)])
    with pytest.raises(ValueError):
        RationalIntervalColouring([Piece(1, 2, 1, False, True), Piece(2, 3, 2, True, True)])
    with pytest.raises(ValueError):
        RationalIntervalColouring([Piece(1, 2, 3)], r=2)
    with pytest.raises(ValueError):
        RationalIntervalColouring([])
    with pytest.raises(ValueError):
        RationalIntervalColouring.from_json([{"lo": "1/0", "hi": 2, "colour": 1}])
    with pytest.raises(ValueError):
        RationalIntervalColouring.from_json([{"lo": 1, "colour": 1}])


def test_from_json_defaults_left_open_right_closed():
    col = RationalIntervalColouring.from_json([{"lo": 1, "hi": "3/2", "colour": 1}, {"lo": "3/2", "hi": 2, "colour": 2}])
    assert col.domain() == "(1, 2]"
    assert col.colour_of("3/2") == 1


@settings(max_examples=50, deadline=None)
@given(st.randoms(use_true_random=False))
def test_json_round_trip(rnd):
    col = random_half_grid_colouring(rnd)
    again = RationalIntervalColouring.from_json({"pieces": col.to_json(), "r": col.r})
    assert again == col
    assert json.loads(json.dumps(col.to_json())) == col.to_json()


def test_template_file_round_trip(tmp_path):
    col = build_rado2_real(EquationSpec((1, 3)))
    path = tmp_path / "t.json"
    save_template(col, str(path))
    text = path.read_bytes()
    assert b"\r" not in text and text.endswith(b"\n")
    assert load_template(str(path)) == col
