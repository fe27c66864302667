import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epchiral.cover import (
    BranchPoint, CoveringSpec, compose, expand_cover_word, format_cover_word, homotopy,
    invert, is_in_cover_subgroup, lift_word, perm_order, rewrite_over_cover_generators,
    standard_two_sheet, supplement_alpha, supplement_beta, verify_homotopy,
)
from epchiral.errors import IndexOutOfRange, NotInSubgroup
from epchiral.loops import lasso_loop
from epchiral.spectra import SquareRoot, trace_loop
from epchiral.words import Word, reduce_free, word

even_text = st.text(alphabet="abAB", max_size=20).filter(lambda s: len(s) % 2 == 0)


# -- permutations and covers -----------------------------------------------------

def test_permutation_helpers():
    p = (1, 2, 0)
    assert compose(p, invert(p)) == (0, 1, 2)
    assert perm_order(p) == 3
    assert perm_order((1, 0, 3, 4, 2)) == 6


def test_standard_two_sheet():
    c = standard_two_sheet(-1j, 1j)
    assert c.n_sheets == 2
    assert [bp.deck_perm for bp in c.branch_points] == [(1, 0), (1, 0)]
    assert c.branch_points[0].cut_direction == pytest.approx(-1j)
    assert standard_two_sheet(0, 1).n_sheets == 2
    with pytest.raises(ValueError):
        standard_two_sheet(1j, 1j)


def test_cover_validation():
    with pytest.raises(ValueError):
        BranchPoint(0, 1, (0, 0))
    with pytest.raises(ValueError):
        # rays from -1 to the right and from +1 to the left cross
        CoveringSpec(2, (BranchPoint(-1, 1, (1, 0)), BranchPoint(1, -1, (1, 0))))
    with pytest.raises(ValueError):
        CoveringSpec(3, (BranchPoint(0, 1, (1, 0)),))


def test_cover_json_roundtrip():
    c = standard_two_sheet(-1j, 1j)
    assert CoveringSpec.from_spec(c.to_spec()) == c


def test_lift_examples():
    c = standard_two_sheet(-1j, 1j)
    r = lift_word(c, word("a"), 0)
    assert (r.closes, r.order_to_close) == (False, 2)
    r = lift_word(c, word("ab"), 0)
    assert (r.closes, r.order_to_close) == (True, 1)
    three = CoveringSpec(3, (BranchPoint(0, 1j, (1, 2, 0)), BranchPoint(5, 1j, (0, 2, 1))))
    assert lift_word(three, word("a"), 0).order_to_close == 3
    assert lift_word(three, word("a"), 0).sheets == (1,)
    with pytest.raises(IndexOutOfRange):
        lift_word(c, Word([(2, 1)]), 0)
    with pytest.raises(IndexOutOfRange):
        lift_word(c, word("a"), 2)


def test_lift_composes_left_to_right():
    three = CoveringSpec(3, (BranchPoint(0, 1j, (1, 2, 0)), BranchPoint(5, 1j, (0, 2, 1))))
    for u, v in [("a", "b"), ("ab", "A"), ("bb", "aB")]:
        tu = lift_word(three, word(u)).total_perm
        tv = lift_word(three, word(v)).total_perm
        assert lift_word(three, word(u + v)).total_perm == compose(tu, tv)
    # non-commuting deck permutations give different lifts for ab and ba
    assert lift_word(three, word("ab")).total_perm != lift_word(three, word("ba")).total_perm


def test_generator_order_equals_cone_order():
    three = CoveringSpec(3, (BranchPoint(0, 1j, (1, 2, 0)), BranchPoint(5, 1j, (0, 2, 1))))
    assert lift_word(three, word("a")).order_to_close == perm_order((1, 2, 0))
    c = standard_two_sheet(-1j, 1j)
    assert lift_word(c, word("b")).order_to_close == 2


@given(st.text(alphabet="abAB", max_size=16))
def test_closure_iff_even(text):
    c = standard_two_sheet(-1j, 1j)
    w = word(text)
    assert lift_word(c, w).closes == (len(reduce_free(w)) % 2 == 0) == is_in_cover_subgroup(w)


@settings(max_examples=20, deadline=None)
@given(st.text(alphabet="abAB", max_size=8), st.integers(0, 2 ** 32 - 1))
def test_closure_matches_spectral_monodromy(text, seed):
    eps = [-1j, 1j]
    w = word(text)
    tr = trace_loop(SquareRoot(*eps), lasso_loop(w, eps, rng=np.random.default_rng(seed)), eps=eps)
    assert lift_word(standard_two_sheet(*eps), w).closes == (not tr.swapped)


# -- subgroup rewriting --------------------------------------------------------------

def test_subgroup_membership():
    assert is_in_cover_subgroup(word("aa"))
    assert not is_in_cover_subgroup(word("a"))
    assert is_in_cover_subgroup(word("ba"))


@pytest.mark.parametrize("text, expected", [
    ("ba", "B C^-1 A"),
    ("ab", "C"),
    ("aabb", "A B"),
    ("", "e"),
    ("AA", "A^-1"),
])
def test_rewrite_examples(text, expected):
    assert format_cover_word(rewrite_over_cover_generators(word(text))) == expected


def test_rewrite_rejects_odd():
    with pytest.raises(NotInSubgroup):
        rewrite_over_cover_generators(word("aba"))


@settings(max_examples=300)
@given(even_text)
def test_rewrite_roundtrip(text):
    w = word(text)
    seq = rewrite_over_cover_generators(w)
    assert expand_cover_word(seq).letters == reduce_free(w).letters


# -- explicit homotopy -----------------------------------------------------------------

def test_supplement_loops():
    assert supplement_alpha(0.0) == pytest.approx(0)
    assert supplement_alpha(1.0) == pytest.approx(0, abs=1e-15)
    assert supplement_beta(0.5) == pytest.approx(4j)
    assert supplement_beta(0.25) == pytest.approx(-4)
    with pytest.raises(ValueError):
        supplement_alpha(1.5)


def test_homotopy_endpoints_formula():
    t = np.linspace(0, 1, 1001)
    assert np.max(np.abs(homotopy(t, 0.0) - supplement_alpha(t))) < 1e-12
    assert np.max(np.abs(homotopy(t, 1.0) - supplement_beta(t))) < 1e-12


def test_verify_homotopy_certificate():
    g = verify_homotopy(256, 256)
    assert g.valid
    assert g.min_puncture_distance > 0
    assert max(g.endpoint_residuals.values()) < 1e-12
    assert max(g.continuity_jumps) < 1e-9
    assert g.lipschitz_lower_bound > 0


def test_verify_homotopy_refinement():
    # the minimum found on finer grids never exceeds a coarser one beyond the Lipschitz slack
    coarse = verify_homotopy(128, 128)
    for n in (256, 512, 1024):
        fine = verify_homotopy(n, n)
        assert fine.valid
        assert fine.min_puncture_distance >= coarse.lipschitz_lower_bound
        assert abs(fine.min_puncture_distance - coarse.min_puncture_distance) <= \
            coarse.min_puncture_distance - coarse.lipschitz_lower_bound


def test_verify_homotopy_grid_bound():
    with pytest.raises(ValueError):
        verify_homotopy(64, 256)
