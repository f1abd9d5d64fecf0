import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from crossratio.core.errors import NonPositiveCrossRatioError, NotStrictlyAdmissibleError
from crossratio.geometry.words import (
    Admissibility,
    Side,
    associated_matrix,
    classify_admissibility,
    classify_cyclic_subwords,
    extension_threshold,
    product,
    symmetric_value,
    tangency_points,
    word_product,
)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


def test_associated_matrix_entries():
    np.testing.assert_array_equal(associated_matrix(SQRT2).matrix, [[0.0, 1.0], [-1.0, SQRT2]])
    m = associated_matrix(1.0).matrix
    assert np.trace(m) == 1.0
    assert np.linalg.det(m) == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_associated_matrix_rejects_nonpositive(bad):
    with pytest.raises(NonPositiveCrossRatioError):
        associated_matrix(bad)


def test_word_products():
    np.testing.assert_allclose(word_product([SQRT2] * 3).product, [[-SQRT2, 1.0], [-1.0, 0.0]], atol=1e-12)
    np.testing.assert_array_equal(word_product([]).product, np.eye(2))
    np.testing.assert_allclose(word_product([SQRT3] * 6).product, -np.eye(2), atol=1e-12)


def test_word_product_rejects_nonpositive_entry():
    with pytest.raises(NonPositiveCrossRatioError) as excinfo:
        word_product([1.0, -2.0])
    assert excinfo.value.details["position"] == 2


def test_symmetric_value_closes_word():
    for n in (3, 6, 18, 30):
        np.testing.assert_allclose(product([symmetric_value(n)] * n), -np.eye(2), atol=1e-12)


def test_classification_known_cases():
    assert classify_admissibility([2.0, 2.0]).kind is Admissibility.STRICT
    assert classify_admissibility([SQRT2] * 3).kind is Admissibility.BOUNDARY
    verdict = classify_admissibility([SQRT2] * 5)
    assert verdict.kind is Admissibility.INADMISSIBLE
    assert verdict.violation == (1, 3)
    assert verdict.condition == "d > 0"


def test_length_four_root_two_word_is_not_admissible():
    # its length-3 subwords already have d = 0
    assert classify_admissibility([SQRT2] * 4).kind is Admissibility.INADMISSIBLE


def test_empty_word_is_strict():
    assert classify_admissibility([]).is_strict


def test_tangency_point_known_values():
    assert tangency_points([2.0, 2.0]) == pytest.approx([0.5, 2.0 / 3.0])
    points = tangency_points([SQRT2] * 3)
    assert points[:2] == pytest.approx([1 / SQRT2, SQRT2])
    assert points[2] == math.inf
    assert tangency_points([4.0]) == pytest.approx([0.25])


@pytest.mark.parametrize("side, expected", [(Side.LEFT, 2 / 3), (Side.RIGHT, 2 / 3), (Side.BOTH, 1.0)])
def test_extension_threshold_known_values(side, expected):
    assert extension_threshold(word_product([2.0, 2.0]), side) == pytest.approx(expected)


def test_both_threshold_gives_boundary_word():
    assert classify_admissibility([1.0, 2.0, 2.0, 1.0]).kind is Admissibility.BOUNDARY


def test_extension_threshold_needs_strict_word():
    with pytest.raises(NotStrictlyAdmissibleError):
        extension_threshold(word_product([SQRT2] * 3), Side.LEFT)


def test_cyclic_subwords_of_closed_word():
    kinds = classify_cyclic_subwords([SQRT3] * 6, 5, 1e-9)
    assert len(kinds) == 6 * 5
    assert all(kinds[(start, length)] is Admissibility.STRICT for start in range(6) for length in range(1, 5))
    assert all(kinds[(start, 5)] is Admissibility.BOUNDARY for start in range(6))


def _fan_oracle(entries):
    """
    Admissibility read off the fan around the real line: the tangency points
    must advance from 0 and may reach infinity only with the last circle.
    """
    points = [0.0] + tangency_points(entries)
    if not all(later > earlier for earlier, later in zip(points, points[1:])):
        return Admissibility.INADMISSIBLE
    return Admissibility.BOUNDARY if points[-1] == math.inf else Admissibility.STRICT


entry = st.floats(min_value=0.05, max_value=4.0, allow_nan=False, allow_infinity=False)
words = st.lists(entry, min_size=1, max_size=8)
strict_entry = st.floats(min_value=1.0, max_value=4.0, allow_nan=False, allow_infinity=False)


@given(words)
@settings(max_examples=300, deadline=None)
def test_classification_matches_fan_oracle(entries):
    verdict = classify_admissibility(entries)
    fan = _fan_oracle(entries)
    assert verdict.is_strict == (fan is Admissibility.STRICT)
    assert verdict.is_admissible == (fan is not Admissibility.INADMISSIBLE)
    assert verdict.kind is fan


@pytest.mark.parametrize("length", [3, 4, 5, 6, 8])
def test_fan_oracle_on_symmetric_words(length):
    value = symmetric_value(length + 1)
    for entries, kind in (
        ([value] * length, Admissibility.BOUNDARY),
        ([value * 1.01] * length, Admissibility.STRICT),
        ([value * 0.99] * length, Admissibility.INADMISSIBLE),
    ):
        assert _fan_oracle(entries) is kind
        assert classify_admissibility(entries, 1e-9).kind is kind


@given(words)
@settings(max_examples=300, deadline=None)
def test_admissible_fans_increase(entries):
    verdict = classify_admissibility(entries)
    assume(verdict.is_admissible)
    points = [0.0] + tangency_points(entries)
    if verdict.kind is Admissibility.BOUNDARY:
        assert points[-1] == math.inf
        points = points[:-1]
    assert all(later > earlier for earlier, later in zip(points, points[1:]))


@st.composite
def strict_pairs(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    u = draw(st.lists(strict_entry, min_size=n, max_size=n))
    v = draw(st.lists(strict_entry, min_size=n, max_size=n))
    t = draw(st.floats(min_value=0.0, max_value=1.0))
    for w in (u, v):
        verdict = classify_admissibility(w)
        assume(verdict.is_strict and verdict.margin > 1e-6)
    return u, v, t


@given(strict_pairs())
@settings(max_examples=200, deadline=None)
def test_strict_words_are_convex(pair):
    u, v, t = pair
    mixed = [t * a + (1 - t) * b for a, b in zip(u, v)]
    assert classify_admissibility(mixed).is_strict

    def p(entries):
        w = word_product(entries)
        return w.b / w.d

    bound = t * p(u) + (1 - t) * p(v)
    assert p(mixed) <= bound + 1e-9 * max(1.0, bound)


@given(strict_pairs(), st.lists(st.floats(min_value=0.0, max_value=3.0), min_size=6, max_size=6))
@settings(max_examples=200, deadline=None)
def test_increasing_entries_keeps_strictness(pair, bumps):
    u, _, _ = pair
    raised = [x + bump for x, bump in zip(u, bumps)]
    assert classify_admissibility(raised).is_strict


@st.composite
def margin_words(draw):
    entries = draw(st.lists(strict_entry, min_size=1, max_size=5))
    verdict = classify_admissibility(entries)
    assume(verdict.is_strict and verdict.margin > 1e-3)
    return entries


@given(margin_words(), st.sampled_from([Side.LEFT, Side.RIGHT, Side.BOTH]))
@settings(max_examples=200, deadline=None)
def test_threshold_is_sharp(entries, side):
    threshold = extension_threshold(word_product(entries), side)

    def extended(x):
        if side is Side.LEFT:
            return [x] + entries
        if side is Side.RIGHT:
            return entries + [x]
        return [x] + entries + [x]

    assert classify_admissibility(extended(threshold + 1e-6)).is_strict
    below = threshold - 1e-6
    assume(below > 0)
    assert classify_admissibility(extended(below)).kind is Admissibility.INADMISSIBLE


@given(margin_words())
@settings(max_examples=200, deadline=None)
def test_proper_subwords_of_boundary_words_are_strict(entries):
    w = word_product(entries)
    entries = entries + [-w.c / w.d]
    assume(classify_admissibility(entries).kind is Admissibility.BOUNDARY)
    n = len(entries)
    for i in range(n):
        for k in range(i + 1, n + 1):
            if (i, k) != (0, n):
                assert classify_admissibility(entries[i:k]).is_strict
