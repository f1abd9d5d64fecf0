"""
Side-pairing patterns of the (12g - 6)-gon.

A one-vertex triangulation of a genus-g surface is cut open along its dual
trivalent graph into a polygon with ``N = 12g - 6`` sides, numbered ``1..N``.
The pattern is the fixed-point-free involution ``mu`` pairing the sides.

Corner ``k`` sits between sides ``k`` and ``k + 1`` (corner ``N`` between ``N``
and ``1``). Gluing reverses orientation, so the end of side ``k`` meets the start
of side ``mu(k)`` and the corner successor is ``next(k) = mu(k) - 1``. A pattern
is valid when every corner cycle has length 3; the cycles are the triangles.

Edges of the triangulation are labelled ``e1, e2, ...`` by first appearance in
side order, and the vertex word is the sequence of edge labels of sides 1..N.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from crossratio.core.errors import (
    CornerCycleError,
    DegenerateLayoutError,
    GenusMismatchError,
    InputError,
    NoNonseparatingTripleError,
    NotAnInvolutionError,
    PreconditionError,
)

logger = logging.getLogger(__name__)


def side_count(genus: int) -> int:
    return 12 * genus - 6


def formal_dimension(genus: int, vertices: int = 1) -> int:
    """Edges minus three equations per vertex; ``6g - 6`` for every vertex count."""
    edges = 6 * genus - 6 + 3 * vertices
    return edges - 3 * vertices


def census_size(genus: int) -> int:
    """Number of labelled valid pairings, before the dihedral reduction."""
    return (2 * math.factorial(6 * genus - 3)) // (
        12**genus * math.factorial(genus) * math.factorial(3 * genus - 2)
    )


class TripleKind(str, Enum):
    SEPARATING = "separating"
    NONSEPARATING = "nonseparating"


@dataclass(frozen=True)
class VertexTriple:
    """The three side pairs meeting at one corner cycle."""

    corners: Tuple[int, int, int]
    pairs: Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]
    kind: TripleKind

    @property
    def is_separating(self) -> bool:
        return self.kind is TripleKind.SEPARATING


@dataclass(frozen=True)
class SidePairingPattern:
    """
    A validated side-pairing pattern.

    ``partner[k - 1]`` is the side glued to side ``k``.
    """

    genus: int
    partner: Tuple[int, ...]
    name: Optional[str] = field(default=None, compare=False)

    @property
    def sides(self) -> int:
        return len(self.partner)

    def mate(self, side: int) -> int:
        return self.partner[side - 1]

    def next_corner(self, corner: int) -> int:
        """Successor of a corner under the gluing: ``mu(k) - 1`` cyclically."""
        return (self.mate(corner) - 2) % self.sides + 1

    def previous_corner(self, corner: int) -> int:
        return self.mate(corner % self.sides + 1)

    @property
    def pairing(self) -> List[Tuple[int, int]]:
        return [(s, t) for s, t in enumerate(self.partner, start=1) if s < t]

    @property
    def corner_cycles(self) -> List[Tuple[int, ...]]:
        """Corner cycles in successor order, each from its smallest corner, sorted."""
        return _corner_cycles(self.partner)

    @property
    def edge_of_side(self) -> Tuple[str, ...]:
        labels: Dict[int, str] = {}
        out = []
        for side in range(1, self.sides + 1):
            key = min(side, self.mate(side))
            if key not in labels:
                labels[key] = f"e{len(labels) + 1}"
            out.append(labels[key])
        return tuple(out)

    @property
    def vertex_word(self) -> Tuple[str, ...]:
        return self.edge_of_side

    @property
    def edges(self) -> List[str]:
        return [f"e{k}" for k in range(1, self.sides // 2 + 1)]

    def edge_sides(self, label: str) -> Tuple[int, int]:
        word = self.vertex_word
        positions = [k for k, name in enumerate(word, start=1) if name == label]
        if len(positions) != 2:
            raise InputError(f"Unknown edge label '{label}'", {"label": label})
        return positions[0], positions[1]

    def to_dict(self) -> dict:
        data = {"genus": self.genus, "sides": self.sides, "pairing": [list(p) for p in self.pairing]}
        if self.name is not None:
            data["name"] = self.name
        return data


def _corner_cycles(partner: Sequence[int]) -> List[Tuple[int, ...]]:
    n = len(partner)
    seen = set()
    cycles = []
    for corner in range(1, n + 1):
        if corner in seen:
            continue
        cycle = []
        k = corner
        while k not in seen:
            seen.add(k)
            cycle.append(k)
            k = (partner[k - 1] - 2) % n + 1
        cycles.append(tuple(cycle))
    return cycles


def build_pattern(genus: int, pairing: Iterable[Sequence[int]], name: Optional[str] = None) -> SidePairingPattern:
    """
    Validate a pairing and build the pattern.

    Args:
        genus: Surface genus ``g >= 1``
        pairing: Pairs ``(i, j)`` of 1-based side indices
        name: Optional display name

    Returns:
        The validated SidePairingPattern

    Raises:
        GenusMismatchError: If the pairs do not cover ``12g - 6`` sides
        NotAnInvolutionError: If the pairs are not a fixed-point-free involution
        CornerCycleError: If a corner cycle does not have length 3
    """
    if genus < 1:
        raise GenusMismatchError(f"Genus must be at least 1, got {genus}", {"genus": genus})
    n = side_count(genus)
    pairs = [tuple(int(v) for v in p) for p in pairing]
    if any(len(p) != 2 for p in pairs):
        raise NotAnInvolutionError("Every pair must have exactly two sides")
    if 2 * len(pairs) != n:
        raise GenusMismatchError(
            f"Genus {genus} needs {n} sides, the pairing covers {2 * len(pairs)}",
            {"genus": genus, "sides": n, "covered": 2 * len(pairs)},
        )
    partner = [0] * n
    for s, t in pairs:
        if s == t:
            raise NotAnInvolutionError(f"Side {s} is paired with itself", {"side": s})
        for side in (s, t):
            if not 1 <= side <= n:
                raise NotAnInvolutionError(f"Side {side} is outside 1..{n}", {"side": side})
            if partner[side - 1]:
                raise NotAnInvolutionError(f"Side {side} is paired twice", {"side": side})
        partner[s - 1], partner[t - 1] = t, s
    for cycle in _corner_cycles(partner):
        if len(cycle) != 3:
            raise CornerCycleError(
                f"Corner cycle {list(cycle)} has length {len(cycle)}, expected 3",
                {"cycle": list(cycle)},
            )
    return SidePairingPattern(genus, tuple(partner), name)


def pattern_from_dict(data: dict) -> SidePairingPattern:
    """Parse the pattern file object ``{"genus", "sides", "pairing", "name"}``."""
    pattern = build_pattern(int(data["genus"]), data["pairing"], data.get("name"))
    if "sides" in data and int(data["sides"]) != pattern.sides:
        raise GenusMismatchError(
            f"Declared {data['sides']} sides, genus {pattern.genus} has {pattern.sides}",
            {"sides": data["sides"]},
        )
    return pattern


def torus_pattern() -> SidePairingPattern:
    """The hexagonal torus pattern ``{1-4, 2-5, 3-6}``."""
    return build_pattern(1, [(1, 4), (2, 5), (3, 6)], name="torus")


# Dihedral canonical form

def _dihedral_maps(n: int) -> List[Tuple[List[int], List[int]]]:
    """All ``(sigma, sigma^-1)`` of the dihedral group, as 1-based lookup lists."""
    maps = []
    for reflect in (False, True):
        for r in range(n):
            sigma = [0] * (n + 1)
            for k in range(1, n + 1):
                base = n + 1 - k if reflect else k
                sigma[k] = (base - 1 + r) % n + 1
            inverse = [0] * (n + 1)
            for k in range(1, n + 1):
                inverse[sigma[k]] = k
            maps.append((sigma, inverse))
    return maps


def _image_is_smaller(partner: Sequence[int], sigma: List[int], inverse: List[int]) -> bool:
    """
    True iff the relabelled partner tuple is lexicographically smaller.

    ``partner`` may be partial (0 marks an unpaired side). The comparison then
    only succeeds when it is decided before the first position that either
    tuple leaves open, so every completion has a smaller image too.
    """
    for k in range(1, len(partner) + 1):
        current = partner[k - 1]
        source = partner[inverse[k] - 1]
        if current == 0 or source == 0:
            return False
        value = sigma[source]
        if value != current:
            return value < current
    return False


def _prefix_is_canonical(partner: Sequence[int], maps) -> bool:
    return not any(_image_is_smaller(partner, sigma, inverse) for sigma, inverse in maps)


def relabel(pattern: SidePairingPattern, rotation: int, reflect: bool = False) -> SidePairingPattern:
    """Apply a dihedral relabelling ``k -> (reflect(k) + rotation)`` to the sides."""
    n = pattern.sides
    sigma = [0] * (n + 1)
    for k in range(1, n + 1):
        base = n + 1 - k if reflect else k
        sigma[k] = (base - 1 + rotation) % n + 1
    partner = [0] * n
    for k in range(1, n + 1):
        partner[sigma[k] - 1] = sigma[pattern.mate(k)]
    return SidePairingPattern(pattern.genus, tuple(partner), pattern.name)


def canonical_form(pattern: SidePairingPattern) -> SidePairingPattern:
    """The dihedral image with the lexicographically smallest partner tuple."""
    best = pattern.partner
    for sigma, inverse in _dihedral_maps(pattern.sides):
        image = tuple(sigma[pattern.partner[inverse[k] - 1]] for k in range(1, pattern.sides + 1))
        if image < best:
            best = image
    return SidePairingPattern(pattern.genus, best, pattern.name)


def is_canonical(pattern: SidePairingPattern) -> bool:
    return not any(
        _image_is_smaller(pattern.partner, sigma, inverse)
        for sigma, inverse in _dihedral_maps(pattern.sides)
    )


# Enumeration

def _corner_ok(partner: List[int], corner: int, n: int) -> bool:
    """Partial check: the walk from ``corner`` must close after exactly 3 steps."""
    k = corner
    for step in range(1, 4):
        mate = partner[k - 1]
        if mate == 0:
            return True
        k = (mate - 2) % n + 1
        if k == corner:
            return step == 3
    return False


def _touched_corners(partner: List[int], side: int, n: int) -> List[int]:
    """Corners whose walks read ``partner[side]`` within their first three steps."""
    corners = [side]
    k = side
    for _ in range(2):
        mate = partner[k % n]
        if mate == 0:
            break
        k = mate
        corners.append(k)
    return corners


def _search(partner: List[int], n: int, found: List[Tuple[int, ...]], maps) -> None:
    try:
        s = partner.index(0) + 1
    except ValueError:
        if all(_corner_ok(partner, c, n) for c in range(1, n + 1)):
            found.append(tuple(partner))
        return
    for t in range(s + 1, n + 1):
        if partner[t - 1]:
            continue
        partner[s - 1], partner[t - 1] = t, s
        corners = _touched_corners(partner, s, n) + _touched_corners(partner, t, n)
        if all(_corner_ok(partner, c, n) for c in corners) and _prefix_is_canonical(partner, maps):
            _search(partner, n, found, maps)
        partner[s - 1] = partner[t - 1] = 0


def _search_branch(args: Tuple[int, int]) -> List[Tuple[int, ...]]:
    """Subtree with side 1 paired to ``first``; top level for the process pool."""
    genus, first = args
    n = side_count(genus)
    partner = [0] * n
    partner[0], partner[first - 1] = first, 1
    found: List[Tuple[int, ...]] = []
    maps = _dihedral_maps(n)
    corners = _touched_corners(partner, 1, n) + _touched_corners(partner, first, n)
    if all(_corner_ok(partner, c, n) for c in corners) and _prefix_is_canonical(partner, maps):
        _search(partner, n, found, maps)
    logger.debug("genus %d, side 1 paired with %d: %d canonical patterns", genus, first, len(found))
    return found


def enumerate_patterns(genus: int, workers: int = 1) -> List[SidePairingPattern]:
    """
    All side-pairing patterns of genus ``g`` up to dihedral relabelling.

    Backtracks over involutions, always pairing the smallest unpaired side, and
    prunes as soon as a corner walk closes too early or fails to close after
    three steps, or a dihedral image of the partial pairing is already
    lexicographically smaller. Only canonical patterns survive.

    Args:
        genus: Surface genus ``g >= 1``
        workers: Processes to split the search over (by the partner of side 1)

    Returns:
        Canonical patterns sorted by partner tuple
    """
    if genus < 1:
        raise PreconditionError(f"Genus must be at least 1, got {genus}", {"genus": genus})
    n = side_count(genus)
    branches = [(genus, first) for first in range(2, n + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_search_branch, branches))
    else:
        results = [_search_branch(branch) for branch in branches]
    partners = sorted(p for chunk in results for p in chunk)
    logger.info("genus %d census: %d patterns", genus, len(partners))
    return [
        SidePairingPattern(genus, p, name=f"g{genus}-{index}")
        for index, p in enumerate(partners, start=1)
    ]


# Triples and layout

def _cyclically_increasing(a: int, b: int, c: int) -> bool:
    return (a < b < c) or (b < c < a) or (c < a < b)


def classify_triple(pattern: SidePairingPattern, cycle: Sequence[int]) -> VertexTriple:
    """
    Separating or non-separating type of a corner cycle.

    The corners are read in successor order; the triple is separating when they
    are cyclically increasing and non-separating when decreasing.

    Raises:
        InputError: If ``cycle`` is not a corner cycle of the pattern
    """
    corners = tuple(int(c) for c in cycle)
    if len(corners) != 3 or not all(1 <= c <= pattern.sides for c in corners):
        raise InputError(f"{list(corners)} is not a corner cycle", {"cycle": list(corners)})
    start = min(range(3), key=lambda i: corners[i])
    corners = corners[start:] + corners[:start]
    if corners not in pattern.corner_cycles:
        raise InputError(f"{list(corners)} is not a corner cycle of the pattern", {"cycle": list(corners)})
    n = pattern.sides
    pairs = []
    for corner in corners:
        side = corner % n + 1
        pairs.append(tuple(sorted((side, pattern.mate(side)))))
    kind = TripleKind.SEPARATING if _cyclically_increasing(*corners) else TripleKind.NONSEPARATING
    return VertexTriple(corners, tuple(pairs), kind)


def triples(pattern: SidePairingPattern) -> List[VertexTriple]:
    return [classify_triple(pattern, cycle) for cycle in pattern.corner_cycles]


@dataclass(frozen=True)
class EdgeLayout:
    """
    The vertex word rotated to read ``x T x y U y z V z``.

    Positions are 1-based in the rotated word: ``x`` at ``1`` and ``j``, ``y`` at
    ``j + 1`` and ``i - 1``, ``z`` at ``i`` and ``N``.
    Side ``rotation + 1`` of the pattern is side 1 of the layout.
    """

    pattern: SidePairingPattern
    rotation: int
    word: Tuple[str, ...]
    x: str
    y: str
    z: str
    i: int
    j: int

    @property
    def dependent(self) -> Tuple[str, str, str]:
        return (self.x, self.y, self.z)

    @property
    def t_labels(self) -> Tuple[str, ...]:
        return self.word[1 : self.j - 1]

    @property
    def u_labels(self) -> Tuple[str, ...]:
        return self.word[self.j + 1 : self.i - 2]

    @property
    def v_labels(self) -> Tuple[str, ...]:
        return self.word[self.i : len(self.word) - 1]

    @property
    def free_labels(self) -> Tuple[str, ...]:
        dependent = set(self.dependent)
        return tuple(label for label in self.pattern.edges if label not in dependent)

    def positions(self, label: str) -> Tuple[int, int]:
        found = [k for k, name in enumerate(self.word, start=1) if name == label]
        if len(found) != 2:
            raise InputError(f"Unknown edge label '{label}'", {"label": label})
        return found[0], found[1]


def _layout_at(pattern: SidePairingPattern, corner: int) -> EdgeLayout:
    n = pattern.sides
    word = pattern.vertex_word
    # side `corner` becomes side N and side `corner + 1` becomes side 1
    rotated = tuple(word[(corner + k - 1) % n] for k in range(1, n + 1))
    relabelled = relabel(pattern, rotation=-corner)
    j = relabelled.mate(1)
    i = relabelled.mate(n)
    if not (1 < j and j + 1 < i - 1 and i < n) or relabelled.mate(j + 1) != i - 1:
        raise NoNonseparatingTripleError(
            f"Corner {corner} does not give an interleaved x T x y U y z V z layout",
            {"corner": corner},
        )
    layout = EdgeLayout(pattern, corner % n, rotated, rotated[0], rotated[j], rotated[i - 1], i, j)
    for name, labels in (("T", layout.t_labels), ("U", layout.u_labels), ("V", layout.v_labels)):
        if not labels:
            raise DegenerateLayoutError(
                f"Subword {name} of the dependent layout is empty",
                {"word": name, "i": i, "j": j},
            )
    return layout


def _layout_corner(pattern: SidePairingPattern, triple: VertexTriple) -> int:
    """
    The corner of a non-separating triple that becomes the corner between
    sides ``N`` and ``1``: the one needing the smallest rotation, so a pattern
    whose triple already sits there keeps its side numbering.
    """
    return min(triple.corners, key=lambda corner: corner % pattern.sides)


def select_dependent_triple(pattern: SidePairingPattern) -> EdgeLayout:
    """
    Lay out the vertex word around a non-separating corner cycle.

    Among all corners of non-separating cycles the one with the smallest
    rotation wins, the corner between sides ``N`` and ``1`` first.

    Args:
        pattern: A pattern of genus ``g >= 2``

    Returns:
        EdgeLayout with dependent labels ``x, y, z`` and gap words ``T, U, V``

    Raises:
        PreconditionError: If ``g < 2``
        NoNonseparatingTripleError: If no corner cycle is non-separating
        DegenerateLayoutError: If one of ``T, U, V`` is empty
    """
    if pattern.genus < 2:
        raise PreconditionError(
            f"A dependent triple needs genus >= 2, got {pattern.genus}", {"genus": pattern.genus}
        )
    candidates = [t for t in triples(pattern) if t.kind is TripleKind.NONSEPARATING]
    if not candidates:
        raise NoNonseparatingTripleError("Pattern has no non-separating corner cycle")
    corner = min((_layout_corner(pattern, t) for t in candidates), key=lambda c: c % pattern.sides)
    return _layout_at(pattern, corner)


def layout_for(pattern: SidePairingPattern, dependent: Sequence[str]) -> EdgeLayout:
    """
    Layout whose dependent labels are exactly ``dependent`` (as a set).

    Raises:
        InputError: If the labels do not form a non-separating triple
    """
    wanted = set(dependent)
    for triple in triples(pattern):
        if triple.kind is not TripleKind.NONSEPARATING:
            continue
        layout = _layout_at(pattern, _layout_corner(pattern, triple))
        if set(layout.dependent) == wanted:
            return layout
    raise InputError(
        f"Labels {sorted(wanted)} are not the edges of a non-separating corner cycle",
        {"dependent": sorted(wanted)},
    )
