import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from crossratio.core.errors import InputError, PatternMismatchError, PointNotInSpaceError, UnknownEdgeError
from crossratio.geometry.holonomy import (
    HolonomyElement,
    Move,
    commuting_check,
    holonomy_of,
    move_matrix,
    move_word,
    normalize_trace,
    relation_residual,
    rigidity_compare,
    side_pairing_generator,
    torus_generators,
    torus_relation_residual,
    torus_traces,
    triple_generators,
)
from crossratio.geometry.moebius import INFINITY, MoebiusMap, apply, is_infinite
from crossratio.geometry.solver import free_values_from_point, solve_point, torus_point
from crossratio.geometry.words import product

from .conftest import G2_SYMMETRIC, SQRT3


def test_move_matrices(hexagonal_point):
    r = move_matrix(Move.remark(), hexagonal_point)
    np.testing.assert_allclose(r.matrix, [[0, 1j], [1j, 1]])
    assert apply(r, 0) == 1j and is_infinite(apply(r, 1j)) and apply(r, INFINITY) == 0
    np.testing.assert_allclose(move_matrix(Move.remark(clockwise=True), hexagonal_point).matrix, [[1, -1j], [-1j, 0]])
    point = torus_point(2.0, 1.0, 3.0)
    np.testing.assert_allclose(move_matrix(Move.rotate("e1"), point).matrix, [[0, 1], [-1, 2]])
    np.testing.assert_allclose(move_matrix(Move.rotate("e1", clockwise=False), point).matrix, [[2, -1], [1, 0]])


def test_move_validation(hexagonal_point):
    with pytest.raises(UnknownEdgeError):
        move_matrix(Move.rotate("e7"), hexagonal_point)
    with pytest.raises(InputError):
        Move(Move.remark().kind, Move.remark().direction, "e1")


def test_empty_words_give_identity(hexagonal_point):
    element = holonomy_of(move_word([], hexagonal_point), move_word([], hexagonal_point))
    assert element.map.projectively_equal(MoebiusMap.identity(), 1e-15)


def test_first_torus_generator_matrix():
    x, y, z = 2.0, 1.0, 3.0
    g1, _, _ = torus_generators(x, y, z)
    expected = MoebiusMap.from_entries(x * 1j, x - 1j, (x * z - 1) * 1j, (x * z - 1) - z * 1j)
    assert g1.map.projectively_equal(expected, 1e-12)


def test_torus_trace_known_values():
    assert torus_traces(SQRT3, SQRT3, SQRT3) == (pytest.approx(2.0), pytest.approx(2.0))
    first, second = torus_traces(2.0, 1.0, 3.0)
    assert first == pytest.approx(5 - 1j)
    assert second == pytest.approx(1 - 1j)


def test_torus_traces_need_in_space_point():
    with pytest.raises(PointNotInSpaceError):
        torus_traces(1.0, 1.0, 1.0)


def test_normalize_trace():
    assert normalize_trace(-2.0) == 2.0
    assert normalize_trace(-3j) == 3j
    assert normalize_trace(-1 + 1j) == 1 - 1j


def test_normalize_trace_ignores_rounding_in_real_part():
    assert normalize_trace(complex(-1e-11, -3.0)) == pytest.approx(complex(1e-11, 3.0))
    assert normalize_trace(complex(1e-11, -3.0)) == pytest.approx(complex(-1e-11, 3.0))
    assert normalize_trace(complex(-1e-6, 3.0)) == pytest.approx(complex(1e-6, -3.0))


coordinate = st.floats(min_value=0.5, max_value=5.0, allow_nan=False, allow_infinity=False)


@given(coordinate, coordinate)
@settings(max_examples=100, deadline=None)
def test_torus_trace_formula_matches_generators(x, y):
    assume(x * y >= 1.1)
    point = torus_point(x, y)
    z = point.values["e3"]
    g1, g2, _ = torus_generators(x, y, z)
    first, second = torus_traces(x, y, z)
    assert abs(g1.trace - first) <= 1e-9 * max(1.0, abs(first))
    assert abs(g2.trace - second) <= 1e-9 * max(1.0, abs(second))
    assert torus_relation_residual(x, y, z) <= 1e-9


def test_torus_holonomy_is_abelian():
    g1, g2, g3 = torus_generators(SQRT3, SQRT3, SQRT3)
    assert commuting_check(g1, g2)
    assert commuting_check(g1, g1)
    assert commuting_check(g2, g3)


def test_parabolic_commutator_is_not_commuting():
    g = HolonomyElement(MoebiusMap.from_entries(1, 1, 1, 2))
    h = HolonomyElement(MoebiusMap.from_entries(1, -1, -1, 2))
    commutator = (g @ h @ g.inverse() @ h.inverse()).map.normalized()
    assert commutator.trace == pytest.approx(-2.0)
    assert not commuting_check(g, h)
    assert commuting_check(g, g.inverse())


def test_triple_relation(symmetric_g2):
    g1, g2, g3 = triple_generators(symmetric_g2)
    assert relation_residual([g3, g2, g1]) <= 1e-9


def test_triple_generators_do_not_commute(symmetric_g2):
    g1, g2, _ = triple_generators(symmetric_g2)
    assert not commuting_check(g1, g2)


def test_first_triple_trace_at_symmetric_point(symmetric_g2):
    g1, _, _ = triple_generators(symmetric_g2)
    assert g1.trace == pytest.approx(1.0 / math.sin(math.pi / 18.0), abs=1e-9)


def test_first_triple_trace_at_solved_point(g2_layout):
    free = {label: G2_SYMMETRIC for label in g2_layout.free_labels}
    free.update(e3=2.5, e4=2.2)
    point, _ = solve_point(g2_layout, free)
    t = product([free[label] for label in g2_layout.t_labels])
    expected = normalize_trace(-t[1, 1] - (t[0, 1] + t[1, 0]) * 1j)
    g1, g2, g3 = triple_generators(point)
    assert abs(g1.trace - expected) <= 1e-9
    assert relation_residual([g3, g2, g1]) <= 1e-9


def test_side_pairings_are_mutually_inverse(symmetric_g2):
    pattern = symmetric_g2.pattern
    for side in range(1, pattern.sides + 1):
        g = side_pairing_generator(symmetric_g2, side)
        h = side_pairing_generator(symmetric_g2, pattern.mate(side))
        assert (g @ h).map.projectively_equal(MoebiusMap.identity(), 1e-9)


def test_rigidity_self_comparison(symmetric_g2):
    report = rigidity_compare(symmetric_g2, symmetric_g2)
    assert report.verdict == "equal"
    assert report.generators == ["side-10", "side-14", "side-18"]
    assert len(report.traces) == 3


def test_rigidity_detects_perturbation(symmetric_g2, g2_layout):
    free = free_values_from_point(symmetric_g2)
    free["e3"] += 1e-2
    moved, _ = solve_point(g2_layout, free)
    assert rigidity_compare(symmetric_g2, moved).verdict == "different"


def test_torus_rigidity(hexagonal_point):
    report = rigidity_compare(hexagonal_point, torus_point(2.0, 1.0, 3.0))
    assert report.verdict == "different"
    assert report.generators == ["gamma1", "gamma2", "gamma3"]
    assert rigidity_compare(hexagonal_point, torus_point(SQRT3, SQRT3)).verdict == "equal"


def test_rigidity_needs_same_pattern(hexagonal_point, symmetric_g2):
    with pytest.raises(PatternMismatchError):
        rigidity_compare(hexagonal_point, symmetric_g2)


def test_rigidity_needs_in_space_points(hexagonal_point):
    with pytest.raises(PointNotInSpaceError):
        rigidity_compare(hexagonal_point, torus_point(1.0, 1.0, 1.0))
