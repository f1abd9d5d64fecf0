"""
Breadth-first development of a packing into the extended complex plane.

Marked triangles are keyed by ``(address, wedge)``: ``address`` is a reduced
word in the side-pairing generators (the deck element of the interstice) and
``wedge`` the marked corner, ``0 .. N-1``. The base key ``((), 0)`` is the
standard interstice. A key's transform is ``rho(address) W_wedge``.

Circles are indexed by deck element too: at key ``(g, m)`` the real line is
circle ``g``, ``Im z = 1`` is circle ``g g_m`` and ``|z - i/2| = 1/2`` is
circle ``g g_{m+1}`` (side 0 read as side N).
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from crossratio.core.config import Settings, settings as default_settings
from crossratio.core.errors import InputError, NotTangentError, PointNotInSpaceError
from crossratio.core.models import (
    AuditReport,
    MergedCircleRecord,
    SceneCircleRecord,
    SceneFile,
)
from crossratio.geometry.combinatorics import SidePairingPattern
from crossratio.geometry.holonomy import REMARK, REMARK_INVERSE
from crossratio.geometry.moebius import (
    GeneralizedCircle,
    MoebiusMap,
    pencil_discriminant,
    standard_interstice,
    tangency_point,
    transform_circle,
)
from crossratio.geometry.solver import ParameterPoint, verify_point

logger = logging.getLogger(__name__)

Address = Tuple[int, ...]
Key = Tuple[Address, int]


def _relators(pattern: SidePairingPattern) -> Dict[Address, None]:
    """Corner relators ``g_s1 g_s2 g_s3`` and their inverses."""
    n = pattern.sides
    out: Dict[Address, None] = {}
    for wedge in range(n):
        sides = []
        m = wedge
        for _ in range(3):
            s = m + 1
            sides.append(s)
            m = pattern.mate(s) % n
        if m != wedge:
            continue
        out[tuple(sides)] = None
        out[tuple(pattern.mate(s) for s in reversed(sides))] = None
    return out


def reduce_address(pattern: SidePairingPattern, address: Iterable[int], relators=None) -> Address:
    """
    Reduce a generator word by free cancellation and corner relators.

    Letters ``s, mu(s)`` cancel; a trailing corner relator is dropped. The result
    is a normal form for the words met during breadth-first growth, not a
    solution of the word problem.
    """
    relators = _relators(pattern) if relators is None else relators
    n = pattern.sides
    stack: List[int] = []
    for side in address:
        side = n if side % n == 0 else side % n
        stack.append(side)
        while True:
            if len(stack) >= 2 and pattern.mate(stack[-2]) == stack[-1]:
                del stack[-2:]
            elif len(stack) >= 3 and tuple(stack[-3:]) in relators:
                del stack[-3:]
            else:
                break
    return tuple(stack)


@dataclass(frozen=True)
class DevelopedInterstice:
    """A developed marked triangle and its three circle addresses."""

    address: Address
    wedge: int
    transform: MoebiusMap
    circles: Tuple[GeneralizedCircle, GeneralizedCircle, GeneralizedCircle]
    circle_addresses: Tuple[Address, Address, Address]
    depth: int


@dataclass
class PackingScene:
    """Developed marked triangles and the circles they carry, keyed by address."""

    pattern: SidePairingPattern
    depth: int
    interstices: List[DevelopedInterstice] = field(default_factory=list)
    circles: Dict[Address, GeneralizedCircle] = field(default_factory=dict)
    closure_deviation: float = 0.0
    consistency_deviation: float = 0.0

    def sorted_circles(self) -> List[Tuple[Address, GeneralizedCircle]]:
        return sorted(self.circles.items(), key=lambda item: (len(item[0]), item[0]))

    def merged(self, tol: float = 1e-9) -> List[Tuple[GeneralizedCircle, int]]:
        """Circles merged by canonical form with their multiplicity."""
        ordered = sorted(self.circles.values(), key=lambda c: c.as_tuple())
        merged: List[List] = []
        for circle in ordered:
            lead = circle.as_tuple()[0]
            found = False
            for entry in reversed(merged):
                # sorted by h11, so earlier entries further than tol cannot match
                if lead - entry[0].as_tuple()[0] > tol:
                    break
                if circle.distance(entry[0]) <= tol:
                    entry[1] += 1
                    found = True
                    break
            if not found:
                merged.append([circle, 1])
        return [(circle, count) for circle, count in merged]


def _associated(x: float) -> MoebiusMap:
    return MoebiusMap.from_entries(0, 1, -1, x)


def _prefixes(point: ParameterPoint) -> List[MoebiusMap]:
    out = [MoebiusMap.identity()]
    for x in point.entries:
        out.append(out[-1] @ _associated(x))
    return out


def generator_map(point: ParameterPoint, side: int, prefixes: Optional[List[MoebiusMap]] = None) -> MoebiusMap:
    """``g_s = W_{s-1} R W_{mu(s) mod N}^-1``."""
    prefixes = prefixes or _prefixes(point)
    n = point.pattern.sides
    return prefixes[side - 1] @ REMARK @ prefixes[point.pattern.mate(side) % n].inverse()


def transform_at(point: ParameterPoint, address: Sequence[int], wedge: int) -> MoebiusMap:
    """Closed form of a key's transform: ``rho(address) W_wedge``."""
    prefixes = _prefixes(point)
    n = point.pattern.sides
    m = MoebiusMap.identity()
    for side in address:
        m = m @ generator_map(point, n if side % n == 0 else side % n, prefixes)
    return m @ prefixes[wedge % n]


def _side(wedge: int, n: int) -> int:
    return n if wedge % n == 0 else wedge % n


def develop(
    point: ParameterPoint,
    depth: int,
    config: Optional[Settings] = None,
    force: bool = False,
) -> PackingScene:
    """
    Develop marked triangles within ``depth`` moves of the base.

    Args:
        point: A verified parameter point
        depth: Move distance from the base marked triangle
        config: Tolerances (default: global settings)
        force: Skip the in-space check (for negative controls)

    Returns:
        PackingScene with interstices in breadth-first order

    Raises:
        PointNotInSpaceError: If the point is not in-space and ``force`` is false
    """
    config = config or default_settings
    if depth < 0:
        raise InputError(f"Depth must be non-negative, got {depth}", {"depth": depth})
    if not force:
        report = verify_point(point, config.acceptance_tolerance)
        if report.verdict != "in-space":
            raise PointNotInSpaceError(
                f"Cannot develop a point that is {report.verdict}",
                {"residual": report.residual, "verdict": report.verdict},
            )

    pattern = point.pattern
    n = pattern.sides
    relators = _relators(pattern)
    entries = point.entries
    standard = standard_interstice()
    scene = PackingScene(pattern, depth)

    def neighbours(key: Key, transform: MoebiusMap):
        address, m = key
        x_next = entries[m % n]
        x_here = entries[_side(m, n) - 1]
        yield (address, (m + 1) % n), transform @ _associated(x_next)
        yield (address, (m - 1) % n), transform @ _associated(x_here).inverse()
        s = m + 1
        yield (reduce_address(pattern, address + (s,), relators), pattern.mate(s) % n), transform @ REMARK
        s = _side(m, n)
        yield (reduce_address(pattern, address + (s,), relators), (pattern.mate(s) - 1) % n), transform @ REMARK_INVERSE

    seen: Dict[Key, MoebiusMap] = {((), 0): MoebiusMap.identity()}
    queue = deque([(((), 0), MoebiusMap.identity(), 0)])
    while queue:
        key, transform, level = queue.popleft()
        _record(scene, key, transform, level, standard, relators)
        if level == depth:
            continue
        for next_key, next_transform in neighbours(key, transform):
            if next_key in seen:
                deviation = seen[next_key].projective_distance(next_transform)
                scene.closure_deviation = max(scene.closure_deviation, deviation)
                continue
            seen[next_key] = next_transform
            queue.append((next_key, next_transform, level + 1))

    logger.info(
        "developed %d marked triangles, %d circles (closure %.3e, consistency %.3e)",
        len(scene.interstices), len(scene.circles), scene.closure_deviation, scene.consistency_deviation,
    )
    return scene


def _record(scene, key, transform, level, standard, relators) -> None:
    address, m = key
    pattern = scene.pattern
    n = pattern.sides
    circle_addresses = (
        address,
        reduce_address(pattern, address + (_side(m, n),), relators),
        reduce_address(pattern, address + (m + 1,), relators),
    )
    circles = tuple(transform_circle(transform, c) for c in standard)
    for circle_address, circle in zip(circle_addresses, circles):
        known = scene.circles.get(circle_address)
        if known is None:
            scene.circles[circle_address] = circle
        else:
            scene.consistency_deviation = max(scene.consistency_deviation, known.distance(circle))
    scene.interstices.append(
        DevelopedInterstice(address, m, transform, circles, circle_addresses, level)
    )


def tangency_audit(scene: PackingScene, tol: Optional[float] = None) -> AuditReport:
    """
    Check that the circles of every developed interstice are pairwise tangent.

    Circles are taken from the scene's address table, so a developing map that
    does not close (an out-of-space point) shows up as failed tangencies.
    """
    tol = default_settings.tangency_tolerance if tol is None else tol
    checked = failures = 0
    worst = 0.0
    pairs = set()
    for interstice in scene.interstices:
        a, b, c = interstice.circle_addresses
        for first, second in ((a, b), (b, c), (c, a)):
            pair = (min(first, second), max(first, second))
            if pair in pairs:
                continue
            pairs.add(pair)
            c1, c2 = scene.circles[first], scene.circles[second]
            checked += 1
            worst = max(worst, abs(pencil_discriminant(c1, c2)))
            try:
                tangency_point(c1, c2, tol)
            except NotTangentError:
                failures += 1
    passed = (
        failures == 0
        and scene.closure_deviation <= tol
        and scene.consistency_deviation <= tol
    )
    return AuditReport(
        checked=checked,
        failures=failures,
        max_discriminant=worst,
        closure_deviation=scene.closure_deviation,
        consistency_deviation=scene.consistency_deviation,
        passed=passed,
    )


def _shape(circle: GeneralizedCircle) -> dict:
    if circle.is_line:
        p, d = circle.line_point, circle.line_direction
        return {"kind": "line", "point": [p.real, p.imag], "direction": [d.real, d.imag]}
    c = circle.center
    return {"kind": "circle", "center": [c.real, c.imag], "radius": circle.radius}


def scene_to_json(scene: PackingScene, tol: Optional[float] = None) -> dict:
    """The scene file document: circles by address and the merged list."""
    tol = default_settings.tangency_tolerance if tol is None else tol
    document = SceneFile(
        pattern=scene.pattern.to_dict(),
        depth=scene.depth,
        circles=[
            SceneCircleRecord(address=list(address), hermitian=list(circle.as_tuple()), shape=_shape(circle))
            for address, circle in scene.sorted_circles()
        ],
        merged=[
            MergedCircleRecord(hermitian=list(circle.as_tuple()), shape=_shape(circle), multiplicity=count)
            for circle, count in scene.merged(tol)
        ],
        interstices=len(scene.interstices),
        closure_deviation=scene.closure_deviation,
        consistency_deviation=scene.consistency_deviation,
    )
    return document.model_dump()
