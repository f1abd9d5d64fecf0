import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from crossratio.core.errors import DegeneratePointsError, NonPositiveCrossRatioError, NotTangentError
from crossratio.geometry.moebius import (
    INFINITY,
    INNER_CIRCLE,
    REAL_LINE,
    UPPER_LINE,
    GeneralizedCircle,
    MoebiusMap,
    apply,
    configuration_cross_ratio,
    configuration_of,
    cross_ratio,
    edge_geometry,
    is_infinite,
    pencil_discriminant,
    radius_cross_ratio,
    tangency_point,
    transform_circle,
)

R = MoebiusMap.from_entries(0, 1j, 1j, 1)


def associated(x):
    return MoebiusMap.from_entries(0, 1, -1, x)


def test_remark_cycles_zero_i_infinity():
    assert apply(R, 0) == 1j
    assert is_infinite(apply(R, 1j))
    assert apply(R, INFINITY) == 0


def test_associated_matrix_sends_zero_to_reciprocal():
    assert apply(associated(2.0), 0) == pytest.approx(0.5)
    assert apply(MoebiusMap.identity(), 3 + 4j) == 3 + 4j


def test_inverse_composes_to_identity():
    m = MoebiusMap.from_entries(1 + 2j, 0.5, -1j, 3)
    assert (m @ m.inverse()).projectively_equal(MoebiusMap.identity(), 1e-12)
    assert abs(m.normalized().det - 1) <= 1e-12


def test_cross_ratio_known_values():
    assert cross_ratio(0.5, 1j, INFINITY, 0) == pytest.approx(2j)
    assert cross_ratio(2.5j, 1, 0, INFINITY) == pytest.approx(2.5j)


def test_cross_ratio_rejects_coincident_points():
    with pytest.raises(DegeneratePointsError):
        cross_ratio(0, 1, 0, INFINITY)


@pytest.mark.parametrize("x", [0.3, 1.0, 2.0, 7.5])
def test_associated_matrix_moves_standard_circles(x):
    a = associated(x)
    assert transform_circle(a, REAL_LINE).distance(REAL_LINE) <= 1e-12
    assert transform_circle(a, UPPER_LINE).distance(INNER_CIRCLE) <= 1e-12


def test_identity_keeps_canonical_form():
    c = GeneralizedCircle.circle(1 - 2j, 0.7)
    assert transform_circle(MoebiusMap.identity(), c).distance(c) <= 1e-15


def test_standard_tangency_points():
    assert is_infinite(tangency_point(REAL_LINE, UPPER_LINE))
    assert abs(tangency_point(REAL_LINE, INNER_CIRCLE)) <= 1e-12
    assert abs(tangency_point(UPPER_LINE, INNER_CIRCLE) - 1j) <= 1e-12


def test_disjoint_circles_are_not_tangent():
    with pytest.raises(NotTangentError) as excinfo:
        tangency_point(REAL_LINE, GeneralizedCircle.circle(2j, 1.0))
    assert "discriminant" in excinfo.value.details


def test_canonical_form_ignores_scale():
    a = GeneralizedCircle(2.0, -1j, 0.0)
    assert a.distance(INNER_CIRCLE) <= 1e-15
    assert GeneralizedCircle(0.0, -3j, 0.0).distance(REAL_LINE) <= 1e-15


@pytest.mark.parametrize("view", ["standard", "sideways"])
@pytest.mark.parametrize("x", [0.4, 1.0, math.sqrt(3.0), 5.0])
def test_configuration_views_recover_cross_ratio(view, x):
    assert configuration_cross_ratio(*configuration_of(x, view)) == pytest.approx(x, rel=1e-9)


def test_configuration_rejects_nonpositive():
    with pytest.raises(NonPositiveCrossRatioError):
        configuration_of(0.0)


def test_radius_cross_ratio_of_equal_circles():
    assert radius_cross_ratio(1.0, 1.0, 1.0) == pytest.approx(2.0)


def test_edge_geometry():
    assert edge_geometry(1.0) == ("tangent", 0.0)
    kind, distance = edge_geometry(2.0)
    assert kind == "disjoint" and distance == pytest.approx(2 * math.acosh(2.0))
    kind, angle = edge_geometry(0.5)
    assert kind == "intersecting" and angle == pytest.approx(2 * math.pi / 3)


coordinate = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def moebius_maps(draw):
    a, b, c, d = (complex(draw(coordinate), draw(coordinate)) for _ in range(4))
    assume(abs(a * d - b * c) >= 0.5)
    return MoebiusMap.from_entries(a, b, c, d)


@st.composite
def circles(draw):
    center = complex(draw(coordinate), draw(coordinate))
    radius = draw(st.floats(min_value=0.2, max_value=2.0))
    return GeneralizedCircle.circle(center, radius)


@given(moebius_maps(), circles())
@settings(max_examples=200, deadline=None)
def test_transform_round_trip(m, c):
    back = transform_circle(m, transform_circle(m.inverse(), c))
    assert back.distance(c) <= 1e-9


@given(moebius_maps(), st.lists(st.tuples(coordinate, coordinate), min_size=4, max_size=4))
@settings(max_examples=200, deadline=None)
def test_cross_ratio_is_invariant(m, coords):
    points = [complex(x, y) for x, y in coords]
    for i in range(4):
        for j in range(i + 1, 4):
            assume(abs(points[i] - points[j]) > 0.1)
    for z in points:
        assume(abs(m.c * z + m.d) > 0.1)
    before = cross_ratio(*points)
    after = cross_ratio(*(m(z) for z in points))
    assert abs(before - after) <= 1e-9 * max(1.0, abs(before))


@given(moebius_maps())
@settings(max_examples=200, deadline=None)
def test_tangency_is_invariant(m):
    c1 = transform_circle(m, REAL_LINE)
    c2 = transform_circle(m, INNER_CIRCLE)
    assert abs(pencil_discriminant(c1, c2)) <= 1e-9
