"""
Holonomy of the projective structure carried by a packed surface.

A marked triangle is moved either by rotating about its marked vertex across an
edge (``A(x)`` clockwise, ``A(x)^-1`` anticlockwise) or by re-marking it
(``R`` anticlockwise, ``R^-1`` clockwise), with ``R = [[0, i], [i, 1]]``.
The holonomy of a loop taking marked triangle 1 to marked triangle 2 is
``W2 W1^-1`` for move words ``W1``, ``W2`` from the base triangle.

The developing base is the interstice left of side 1, so the side pairing of
side ``s`` is ``W_{s-1} R W_{mu(s)}^-1`` with ``W_k`` the vertex-word prefixes.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from crossratio.core.errors import (
    InputError,
    PatternMismatchError,
    PointNotInSpaceError,
    UnknownEdgeError,
)
from crossratio.core.models import GeneratorAgreement, RigidityReport
from crossratio.geometry.combinatorics import EdgeLayout, SidePairingPattern, relabel, select_dependent_triple
from crossratio.geometry.moebius import MoebiusMap
from crossratio.geometry.solver import ParameterPoint, torus_point, verify_point

logger = logging.getLogger(__name__)

TRACE_TOLERANCE = 1e-9

REMARK = MoebiusMap.from_entries(0, 1j, 1j, 1)
REMARK_INVERSE = MoebiusMap.from_entries(1, -1j, -1j, 0)


class MoveKind(str, Enum):
    ROTATE = "rotate"
    REMARK = "remark"


class Direction(str, Enum):
    CLOCKWISE = "clockwise"
    ANTICLOCKWISE = "anticlockwise"


@dataclass(frozen=True)
class Move:
    """A basic move of a marked triangle; rotations name the crossed edge."""

    kind: MoveKind
    direction: Direction
    edge: Optional[str] = None

    def __post_init__(self):
        if self.kind is MoveKind.ROTATE and self.edge is None:
            raise InputError("A rotation must name the edge it crosses")
        if self.kind is MoveKind.REMARK and self.edge is not None:
            raise InputError("A re-marking does not cross an edge")

    @classmethod
    def rotate(cls, edge: str, clockwise: bool = True) -> "Move":
        return cls(MoveKind.ROTATE, Direction.CLOCKWISE if clockwise else Direction.ANTICLOCKWISE, edge)

    @classmethod
    def remark(cls, clockwise: bool = False) -> "Move":
        return cls(MoveKind.REMARK, Direction.CLOCKWISE if clockwise else Direction.ANTICLOCKWISE)


def _associated(x: float) -> MoebiusMap:
    return MoebiusMap.from_entries(0, 1, -1, x)


def move_matrix(move: Move, point: ParameterPoint) -> MoebiusMap:
    """
    Matrix of a single move at a parameter point.

    Raises:
        UnknownEdgeError: If a rotation crosses an edge the point does not have
    """
    if move.kind is MoveKind.REMARK:
        return REMARK if move.direction is Direction.ANTICLOCKWISE else REMARK_INVERSE
    if move.edge not in point.values:
        raise UnknownEdgeError(f"Unknown edge '{move.edge}'", {"label": move.edge})
    a = _associated(point.values[move.edge])
    return a if move.direction is Direction.CLOCKWISE else a.inverse()


@dataclass(frozen=True)
class MoveWord:
    """Moves applied left to right with their cached product."""

    moves: Tuple[Move, ...]
    product: MoebiusMap = field(compare=False, repr=False)


def move_word(moves: Sequence[Move], point: ParameterPoint) -> MoveWord:
    m = MoebiusMap.identity()
    for move in moves:
        m = m @ move_matrix(move, point)
    if abs(m.det - 1.0) > 1e-12 * max(1.0, float(np.max(np.abs(m.matrix))) ** 2):
        logger.warning("move word determinant drifted to %s", m.det)
    return MoveWord(tuple(moves), m)


@dataclass(frozen=True)
class HolonomyElement:
    """A holonomy map; equality is projective."""

    map: MoebiusMap
    words: Optional[Tuple[MoveWord, MoveWord]] = field(default=None, compare=False)

    @property
    def trace(self) -> complex:
        return normalize_trace(self.map.normalized().trace)

    def __matmul__(self, other: "HolonomyElement") -> "HolonomyElement":
        return HolonomyElement(self.map @ other.map)

    def inverse(self) -> "HolonomyElement":
        return HolonomyElement(self.map.inverse())

    def equals(self, other: "HolonomyElement", tol: float = TRACE_TOLERANCE) -> bool:
        return self.map.projectively_equal(other.map, tol)


def holonomy_of(w1: MoveWord, w2: MoveWord) -> HolonomyElement:
    """``product(w2) product(w1)^-1``: the deck map taking triangle 1 to triangle 2."""
    return HolonomyElement(w2.product @ w1.product.inverse(), (w1, w2))


def normalize_trace(value: complex, tol: float = TRACE_TOLERANCE) -> complex:
    """
    Fix the PSL2 sign: the first non-zero of (real, imaginary) is made positive.

    A real part within ``tol * max(1, |value|)`` of zero counts as zero, so
    rounding noise on a purely imaginary trace does not pick the sign.
    """
    value = complex(value)
    lead = value.real if abs(value.real) > tol * max(1.0, abs(value)) else value.imag
    if lead < 0:
        value = -value
    return complex(value.real + 0.0, value.imag + 0.0)


def _fan_moves(word: Sequence[str], count: int) -> List[Move]:
    """Clockwise rotations across the first ``count`` edges of the vertex word."""
    return [Move.rotate(word[k]) for k in range(count)]


def _generator(pattern: SidePairingPattern, word: Sequence[str], point: ParameterPoint, side: int) -> HolonomyElement:
    n = pattern.sides
    if not 1 <= side <= n:
        raise InputError(f"Side must be in 1..{n}, got {side}", {"side": side})
    target = move_word(_fan_moves(word, side - 1) + [Move.remark()], point)
    source = move_word(_fan_moves(word, pattern.mate(side) % n), point)
    return holonomy_of(source, target)


def side_pairing_generator(point: ParameterPoint, side: int) -> HolonomyElement:
    """
    The deck map pairing ``side`` with its mate.

    ``g_s = W_{s-1} R W_{mu(s) mod N}^-1`` and ``g_{mu(s)} = g_s^-1`` projectively.
    """
    return _generator(point.pattern, point.pattern.vertex_word, point, side)


def triple_generators(
    point: ParameterPoint, layout: Optional[EdgeLayout] = None
) -> Tuple[HolonomyElement, HolonomyElement, HolonomyElement]:
    """
    Holonomy of the three side pairings at the dependent corner.

    Computed in the rotated layout ``x T x y U y z V z``: the pairings of
    sides ``j``, ``i - 1`` and ``N``, whose product ``g3 g2 g1`` is the identity.
    The first has trace ``-(t4 + (t2 + t3) i)`` up to sign.
    """
    layout = layout or point.layout or select_dependent_triple(point.pattern)
    if layout.pattern != point.pattern:
        raise PatternMismatchError("Layout and point use different patterns")
    rotated = relabel(point.pattern, rotation=-layout.rotation)
    n = rotated.sides
    return tuple(
        _generator(rotated, layout.word, point, side) for side in (layout.j, layout.i - 1, n)
    )


def torus_generators(x: float, y: float, z: float) -> Tuple[HolonomyElement, HolonomyElement, HolonomyElement]:
    """
    ``A3 A1 R``, ``A3 A1 A2 R A3^-1`` and ``A3 A1 A2 A3 R A1^-1 A3^-1``
    with ``A1 = A(x)``, ``A2 = A(y)``, ``A3 = A(z)``.
    """
    point = torus_point(x, y, z)
    ax, ay, az = Move.rotate("e1"), Move.rotate("e2"), Move.rotate("e3")
    r = Move.remark()

    def element(moves: List[Move], inverse: List[Move]) -> HolonomyElement:
        return holonomy_of(move_word(inverse, point), move_word(moves, point))

    return (
        element([az, ax, r], []),
        element([az, ax, ay, r], [az]),
        element([az, ax, ay, az, r], [az, ax]),
    )


def torus_traces(x: float, y: float, z: float, tol: float = TRACE_TOLERANCE) -> Tuple[complex, complex]:
    """
    Traces ``(xz - 1 + (x - z) i, xy - 1 + (y - x) i)`` of the torus generators, sign normalized.

    Raises:
        PointNotInSpaceError: If ``(x, y, z)`` is not in the torus parameter space
    """
    report = verify_point(torus_point(x, y, z), tol)
    if report.verdict != "in-space":
        raise PointNotInSpaceError(
            f"Torus point ({x}, {y}, {z}) is {report.verdict}",
            {"residual": report.residual, "verdict": report.verdict},
        )
    return (
        normalize_trace(complex(x * z - 1.0, x - z)),
        normalize_trace(complex(x * y - 1.0, y - x)),
    )


def commuting_check(g: HolonomyElement, h: HolonomyElement, tol: float = TRACE_TOLERANCE) -> bool:
    """
    Projective commutation: ``g h g^-1 h^-1`` is the identity up to sign.

    A trace test alone would also accept parabolic commutators.
    """
    commutator = g.map @ h.map @ g.map.inverse() @ h.map.inverse()
    return commutator.projectively_equal(MoebiusMap.identity(), tol)


def generators(point: ParameterPoint) -> Tuple[HolonomyElement, ...]:
    """Torus generators for genus 1, dependent-triple side pairings otherwise."""
    if point.pattern.genus == 1:
        values = point.values
        return torus_generators(values["e1"], values["e2"], values["e3"])
    return triple_generators(point)


def _trace_pair(value: complex) -> List[float]:
    return [value.real + 0.0, value.imag + 0.0]


def rigidity_compare(p1: ParameterPoint, p2: ParameterPoint, tol: float = TRACE_TOLERANCE) -> RigidityReport:
    """
    Compare the generator traces of two points on the same pattern.

    Raises:
        PatternMismatchError: If the patterns (or dependent triples) differ
        PointNotInSpaceError: If either point is not in-space
    """
    if p1.pattern != p2.pattern:
        raise PatternMismatchError(
            "Rigidity comparison needs points on the same pattern",
            {"first": p1.pattern.to_dict(), "second": p2.pattern.to_dict()},
        )
    if p1.layout is not None and p2.layout is not None and p1.layout.dependent != p2.layout.dependent:
        raise PatternMismatchError(
            "Rigidity comparison needs the same dependent triple",
            {"first": list(p1.layout.dependent), "second": list(p2.layout.dependent)},
        )
    for name, point in (("first", p1), ("second", p2)):
        report = verify_point(point)
        if report.verdict != "in-space":
            raise PointNotInSpaceError(
                f"The {name} point is {report.verdict}",
                {"residual": report.residual, "verdict": report.verdict},
            )
    layout = p1.layout or p2.layout
    if p1.pattern.genus == 1:
        first, second = generators(p1), generators(p2)
        names = ["gamma1", "gamma2", "gamma3"]
    else:
        layout = layout or select_dependent_triple(p1.pattern)
        first, second = triple_generators(p1, layout), triple_generators(p2, layout)
        names = [f"side-{side}" for side in (layout.j, layout.i - 1, layout.pattern.sides)]

    agreements = []
    for name, g, h in zip(names, first, second):
        deviation = abs(g.trace - h.trace)
        agreements.append(
            GeneratorAgreement(
                generator=name,
                first=_trace_pair(g.trace),
                second=_trace_pair(h.trace),
                deviation=deviation,
                agrees=deviation <= tol,
            )
        )
    verdict = "equal" if all(a.agrees for a in agreements) else "different"
    logger.info("rigidity comparison: %s", verdict)
    return RigidityReport(
        generators=names,
        traces=[a.first for a in agreements],
        comparison=agreements,
        verdict=verdict,
    )


def relation_residual(elements: Sequence[HolonomyElement]) -> float:
    """Distance of the ordered product from ``+-I``."""
    m = MoebiusMap.identity()
    for element in elements:
        m = m @ element.map
    return m.projective_distance(MoebiusMap.identity())


def torus_relation_residual(x: float, y: float, z: float) -> float:
    """Distance of ``g3 g2^-1 g1`` from ``+-I``."""
    g1, g2, g3 = torus_generators(x, y, z)
    return relation_residual([g3, g2.inverse(), g1])

