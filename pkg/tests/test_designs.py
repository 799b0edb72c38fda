from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbdesign.designs import (
    Design,
    DesignParseError,
    block_profile,
    canonical_form,
    classify,
    format_design,
    incidence_matrices,
    load_fixture,
    parse_design,
    sequence_profile,
)

from conftest import random_design

T5_ROWS = [(1, 2, 3, 4, 5), (2, 5, 3, 1, 4), (3, 5, 2, 4, 1), (4, 3, 2, 1, 5)]
T4_ROWS = [(2, 3, 4), (1, 4, 3), (4, 1, 2), (3, 2, 1)]


def test_parse_first_display():
    text = "t=5 b=4 k=5\n" + "\n".join(" ".join(map(str, r)) for r in T5_ROWS)
    d = parse_design(text)
    assert (d.t, d.b, d.k) == (5, 4, 5)
    assert d.layout == tuple(T5_ROWS)


def test_fixtures_match_displays():
    assert load_fixture("cnbd2_t5.design").layout == tuple(T5_ROWS)
    assert load_fixture("cnbd2_t4.design").layout == tuple(T4_ROWS)


def test_parse_constant_design():
    d = parse_design("# one block\nt=1 b=1 k=3\n1 1 1\n")
    assert (d.t, d.b, d.k) == (1, 1, 3)


@pytest.mark.parametrize(
    "text, fragment, line",
    [
        ("t=5 b=1 k=3\n1 2 6\n", "label 6 out of range", 2),
        ("t=5 b=2 k=3\n1 2 3\n1 2\n", "row has 2 labels", 3),
        ("t=5 b=2 k=3\n1 2 3\n", "declares b=2", 2),
        ("b=2 t=5 k=3\n1 2 3\n", "expected header", 1),
        ("t=3 b=1 k=3\n1 x 3\n", "non-integer", 2),
        ("t=3 b=1 k=3\n1 | 1 2 3 | 1\n", "contradict circularity", 2),
        ("# only a comment\n", "missing header", None),
    ],
)
def test_parse_errors(text, fragment, line):
    with pytest.raises(DesignParseError) as exc:
        parse_design(text)
    assert fragment in str(exc.value)
    assert exc.value.lineno == line


def test_parse_accepts_consistent_borders():
    d = parse_design("t=4 b=1 k=3\n4 | 2 3 4 | 2\n")
    assert d.layout == ((2, 3, 4),)


def test_format_round_trip(cnbd2_t5):
    assert parse_design(format_design(cnbd2_t5, "x")) == cnbd2_t5


def test_design_validation():
    with pytest.raises(ValueError):
        Design(3, 1, 3, ((1, 2, 4),))
    with pytest.raises(ValueError):
        Design(3, 2, 3, ((1, 2, 3),))


def test_neighbour_labels_second_display():
    d = Design.from_blocks([(2, 3, 4)], t=4)
    inc = incidence_matrices(d)
    assert [int(np.argmax(r)) + 1 for r in inc.L] == [4, 2, 3]
    assert [int(np.argmax(r)) + 1 for r in inc.R] == [3, 4, 2]


@pytest.mark.parametrize("seed", range(10))
def test_incidence_identities(seed):
    rng = np.random.default_rng(seed)
    d = random_design(rng, t=int(rng.integers(1, 7)), b=int(rng.integers(1, 6)), k=int(rng.integers(1, 7)))
    inc = incidence_matrices(d)
    for M in (inc.T, inc.L, inc.R, inc.B):
        assert np.all(M.sum(axis=1) == 1)
    assert np.array_equal(inc.B.T @ inc.T, inc.B.T @ inc.L)
    assert np.array_equal(inc.B.T @ inc.T, inc.B.T @ inc.R)
    assert np.array_equal(inc.T.T @ inc.T, inc.L.T @ inc.L)
    assert np.array_equal(inc.T.T @ inc.T, inc.R.T @ inc.R)
    # right neighbours see the transposed left-neighbour pattern
    assert np.array_equal(inc.R.T @ inc.T, inc.T.T @ inc.L)


def test_profile_abbcc():
    bp = block_profile((1, 2, 2, 3, 3))
    assert [bp.n[x] for x in (1, 2, 3)] == [1, 2, 2]
    # circular adjacent pairs: (3,1) (1,2) (2,2) (2,3) (3,3)
    assert bp.sum_m == 2
    # left/right pairs around each plot: (3,2) (1,2) (2,3) (2,3) (3,1)
    assert bp.sum_p == 0


def test_profile_constant_block():
    bp = block_profile((1, 1, 1))
    assert (bp.n[1], bp.m[1], bp.p[1]) == (3, 3, 3)


def test_profile_binary_block():
    bp = block_profile((1, 2, 3, 4, 5))
    assert bp.sum_m == 0 and bp.sum_p == 0


def test_sequence_profile_histogram(cnbd2_t5):
    prof = sequence_profile(cnbd2_t5)
    assert prof.histogram == {(1, 2, 3, 4, 5): Fraction(1)}
    assert all(sum(bp.n.values()) == 5 for bp in prof.blocks)


def test_canonical_form():
    assert canonical_form((3, 1, 1, 5, 3)) == (1, 2, 2, 3, 1)


def _ordered_pair_counts(d, left_offset, right_offset):
    c = Counter()
    for row in d.with_borders():
        for j in range(1, d.k + 1):
            c[(row[j + left_offset], row[j + right_offset])] += 1
    return c


def test_classify_first_display(cnbd2_t5):
    r = classify(cnbd2_t5)
    assert r.is_binary and r.is_balanced_block and r.is_cnbd and r.is_cnbd2
    assert r.ell == 1 and r.ell_integral


def test_classify_second_display_by_enumeration(cnbd2_t4):
    outer = _ordered_pair_counts(cnbd2_t4, -1, 1)
    pairs = [(x, y) for x in range(1, 5) for y in range(1, 5) if x != y]
    assert len(pairs) == 12 and all(outer[p] == 1 for p in pairs)
    r = classify(cnbd2_t4)
    assert r.is_cnbd2 and r.ell == 1


def test_classify_self_neighbour():
    d = Design.from_blocks([(1, 1, 2), (2, 3, 1)], t=3)
    r = classify(d)
    assert not r.is_binary and not r.no_self_neighbor_d1 and not r.is_cnbd


def test_classify_non_integral_ell():
    d = Design.from_blocks([(1, 2, 3)], t=3)
    r = classify(d)
    assert r.ell == Fraction(1, 2) and not r.ell_integral and not r.is_cnbd


@st.composite
def design_and_symmetry(draw):
    t = draw(st.integers(2, 6))
    k = draw(st.integers(2, 6))
    b = draw(st.integers(1, 5))
    rows = draw(st.lists(st.lists(st.integers(1, t), min_size=k, max_size=k), min_size=b, max_size=b))
    perm = draw(st.permutations(range(1, t + 1)))
    order = draw(st.permutations(range(b)))
    return Design.from_blocks(rows, t=t), dict(zip(range(1, t + 1), perm)), order


@settings(max_examples=60, deadline=None)
@given(design_and_symmetry())
def test_classify_invariant_under_relabel_and_block_order(case):
    d, perm, order = case
    r = classify(d)
    assert classify(d.relabel(perm)) == r
    assert classify(d.permute_blocks(order)) == r
    assert (not r.is_cnbd2 or r.is_cnbd) and (not r.is_cnbd or r.is_binary)
    if r.is_cnbd:
        assert r.ell_integral and r.ell * d.t * (d.t - 1) == d.b * d.k


def test_known_cnbds_classify(cnbd_t5_k4, cnbd2_t7_k6):
    assert classify(cnbd_t5_k4).is_cnbd
    assert classify(cnbd2_t7_k6).is_cnbd2
