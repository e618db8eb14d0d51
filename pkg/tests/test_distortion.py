from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from cantor_quant.distortion import (
    BudgetExceeded,
    Codebook,
    distortion_of_words,
    evaluate_codebook,
    voronoi_boundaries,
)
from cantor_quant.engine import canonical_optimal_words, codebook_from_words, optimal_error
from cantor_quant.word_measure import centroid, cylinder, interval_distortion, weight, words_of_length

V = F(16, 153)
TIGHT = F(1, 10**12)


def uniform_bracket(points, depth):
    """Non-adaptive bracket: every depth-``depth`` cylinder is either inside one region (exact) or bounded."""
    lower = upper = F(0)
    for w in words_of_length(depth):
        c = cylinder(w)
        owners_left = {a for a in points if all(abs(c.left - a) <= abs(c.left - b) for b in points)}
        owners_right = {a for a in points if all(abs(c.right - a) <= abs(c.right - b) for b in points)}
        common = owners_left & owners_right
        if common:
            # both ends closest to the same point; regions are intervals so the whole cylinder is
            exact = interval_distortion(w, min(common))
            lower += exact
            upper += exact
        else:
            upper += min(interval_distortion(w, a) for a in points)
    return lower, upper


def test_voronoi_boundaries():
    assert voronoi_boundaries([F(1, 6), F(5, 6)]) == [F(1, 2)]
    assert voronoi_boundaries([F(1, 6), F(7, 12), F(11, 12)]) == [F(3, 8), F(3, 4)]
    assert voronoi_boundaries([F(2, 3)]) == []
    with pytest.raises(ValueError):
        voronoi_boundaries([F(1, 2), F(1, 3)])
    with pytest.raises(ValueError):
        Codebook([F(1, 2), F(1, 2)])


def test_single_point_is_exact():
    est = evaluate_codebook([F(2, 3)], F(1, 2))
    assert est.lower == est.upper == V and est.cylinders_expanded == 0
    est = evaluate_codebook([F(1, 2)], TIGHT)
    # V + (1/2 - 2/3)^2
    assert est.lower == est.upper == V + F(1, 36) == F(9, 68)


def test_two_means_bracket():
    est = evaluate_codebook([F(1, 6), F(5, 6)], TIGHT)
    assert est.brackets(F(13, 612))
    assert est.upper - est.lower <= TIGHT


@pytest.mark.parametrize("n", range(1, 14))
def test_engine_codebooks_bracket_optimal_error(n):
    est = evaluate_codebook(codebook_from_words(canonical_optimal_words(n)), TIGHT)
    assert est.brackets(optimal_error(n))
    assert est.upper - est.lower <= TIGHT


def test_detects_suboptimal_codebook():
    est = evaluate_codebook([F(1, 6) + F(1, 100), F(5, 6)], TIGHT)
    assert est.lower > F(13, 612)


codebooks = st.lists(st.fractions(0, 1, max_denominator=200), min_size=1, max_size=5, unique=True).map(sorted)


@settings(max_examples=40, deadline=None)
@given(codebooks)
def test_agrees_with_uniform_bracket(points):
    est = evaluate_codebook(points, F(1, 10**6), record_history=True)
    lo, hi = uniform_bracket(points, 6)
    # both are certified enclosures of the same number
    assert est.lower <= hi and lo <= est.upper
    assert est.upper - est.lower <= F(1, 10**6)
    # refinement never loosens the bracket
    for (l0, u0), (l1, u1) in zip(est.history, est.history[1:]):
        assert l0 <= l1 and u1 <= u0


def test_straddled_cylinder_can_beat_its_within_variance():
    # two code points inside J_2 serve it better than any single point could,
    # which is why a straddling cylinder's lower bound is 0
    points = [centroid("1"), centroid("21"), centroid("22")]
    est = evaluate_codebook(points, TIGHT)
    on_j2 = est.upper - weight("1") * V
    assert on_j2 == (weight("21") + weight("22")) * V
    assert on_j2 < weight("2") * V


def test_budget():
    with pytest.raises(BudgetExceeded):
        evaluate_codebook([F(1, 6) + F(1, 100), F(5, 6) - F(1, 1000)], F(1, 10**30), budget=3)
    with pytest.raises(ValueError):
        evaluate_codebook([F(1, 2)], 0)


def test_distortion_of_words():
    assert distortion_of_words(["1", "2"]) == F(13, 612)
    assert distortion_of_words(["1", "21", "221", "222"]) == F(421, 156672)
    assert distortion_of_words([""]) == V
    with pytest.raises(ValueError):
        distortion_of_words(["1", "21"])


@pytest.mark.parametrize("n", range(1, 21))
def test_cross_form_agreement(n):
    words = canonical_optimal_words(n)
    assert distortion_of_words(words) == sum(interval_distortion(w, centroid(w)) for w in words)
