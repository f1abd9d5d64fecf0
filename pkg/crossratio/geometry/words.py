"""
Associated matrices, cross-ratio words and the admissibility sign test.

A cross ratio ``x > 0`` is attached to ``A(x) = [[0, 1], [-1, x]]``. A word
``(x_1, ..., x_k)`` carries the product ``A(x_1) ... A(x_k)`` with entries
``(a, b, c, d)``.

Admissibility is decided by signs of subword entries: every subword needs
``a <= 0`` (zero only for single letters), ``b > 0``, ``c < 0``, ``d > 0``;
the full word may have ``d = 0``, which makes it a boundary word. All sign
tests treat ``|v| <= eps`` as zero.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from crossratio.core.errors import NonPositiveCrossRatioError, NotStrictlyAdmissibleError

logger = logging.getLogger(__name__)

DEAD_BAND = 1e-12


class Admissibility(str, Enum):
    STRICT = "strict"
    BOUNDARY = "boundary"
    INADMISSIBLE = "inadmissible"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"


def _check_entries(entries: Sequence[float]) -> Tuple[float, ...]:
    values = tuple(float(x) for x in entries)
    for position, x in enumerate(values, start=1):
        if not (math.isfinite(x) and x > 0):
            raise NonPositiveCrossRatioError(
                f"Cross ratios must be positive and finite; entry {position} is {x}",
                {"position": position, "value": x},
            )
    return values


@dataclass(frozen=True)
class AssociatedMatrix:
    """The matrix ``[[0, 1], [-1, x]]`` of a single edge."""

    x: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[0.0, 1.0], [-1.0, self.x]])

    @property
    def inverse(self) -> np.ndarray:
        return np.array([[self.x, -1.0], [1.0, 0.0]])


def associated_matrix(x: float) -> AssociatedMatrix:
    """
    Associated matrix of a cross ratio.

    Raises:
        NonPositiveCrossRatioError: If ``x <= 0``
    """
    (value,) = _check_entries([x])
    return AssociatedMatrix(value)


def product(entries: Sequence[float]) -> np.ndarray:
    """Left-to-right product of associated matrices; identity for ``()``."""
    m = np.eye(2)
    for x in entries:
        # m @ A(x) without building A(x)
        m = np.array([[-m[0, 1], m[0, 0] + x * m[0, 1]], [-m[1, 1], m[1, 0] + x * m[1, 1]]])
    return m


def prefix_products(entries: Sequence[float]) -> List[np.ndarray]:
    """``[W_0, W_1, ..., W_k]`` with ``W_0 = I`` and ``W_j = W_{j-1} A(x_j)``."""
    out = [np.eye(2)]
    for x in entries:
        m = out[-1]
        out.append(np.array([[-m[0, 1], m[0, 0] + x * m[0, 1]], [-m[1, 1], m[1, 0] + x * m[1, 1]]]))
    return out


@dataclass(frozen=True)
class CrossRatioWord:
    """A sequence of positive cross ratios with its cached product."""

    entries: Tuple[float, ...]
    product: np.ndarray = field(compare=False, repr=False)

    @property
    def a(self) -> float:
        return float(self.product[0, 0])

    @property
    def b(self) -> float:
        return float(self.product[0, 1])

    @property
    def c(self) -> float:
        return float(self.product[1, 0])

    @property
    def d(self) -> float:
        return float(self.product[1, 1])

    def __len__(self) -> int:
        return len(self.entries)


def word_product(entries: Sequence[float]) -> CrossRatioWord:
    """
    Build a cross-ratio word.

    Args:
        entries: Positive cross ratios ``(x_1, ..., x_k)``

    Returns:
        The word with product ``A(x_1) ... A(x_k)``

    Raises:
        NonPositiveCrossRatioError: If an entry is not positive
    """
    values = _check_entries(entries)
    m = product(values)
    m.setflags(write=False)
    return CrossRatioWord(values, m)


@dataclass(frozen=True)
class AdmissibilityClass:
    """Outcome of the sign test."""

    kind: Admissibility
    margin: float
    violation: Optional[Tuple[int, int]] = None
    condition: Optional[str] = None

    @property
    def is_strict(self) -> bool:
        return self.kind is Admissibility.STRICT

    @property
    def is_admissible(self) -> bool:
        return self.kind is not Admissibility.INADMISSIBLE


@dataclass(frozen=True)
class _OwnStatus:
    strict_ok: bool
    boundary_ok: bool
    failed: Optional[str]
    margin: float


def _own_status(m: np.ndarray, length: int, eps: float) -> _OwnStatus:
    """Sign conditions of one subword, ignoring its own subwords."""
    slacks = [("b > 0", m[0, 1]), ("c < 0", -m[1, 0]), ("d > 0", m[1, 1])]
    if length > 1:
        slacks.insert(0, ("a < 0", -m[0, 0]))
    strict_ok = boundary_ok = True
    failed = None
    margin = math.inf
    for name, value in slacks:
        slack = float(value)
        margin = min(margin, slack)
        if slack > eps:
            continue
        strict_ok = False
        if failed is None:
            failed = name
        if not (name == "d > 0" and abs(slack) <= eps):
            boundary_ok = False
    return _OwnStatus(strict_ok, boundary_ok, failed, margin)


def _subword_table(
    entries: Tuple[float, ...], cyclic: bool, max_length: int, eps: float
) -> Tuple[Dict[Tuple[int, int], Admissibility], Dict[Tuple[int, int], _OwnStatus]]:
    """
    Classify subwords ``(start, length)`` by dynamic programming.

    A subword is strict iff its own conditions hold strictly and both of its
    maximal proper subwords are strict; boundary iff its own conditions hold with
    ``d = 0`` and both maximal proper subwords are strict.
    """
    n = len(entries)
    own: Dict[Tuple[int, int], _OwnStatus] = {}
    for start in range(n):
        m = np.eye(2)
        limit = max_length if cyclic else min(max_length, n - start)
        for length in range(1, limit + 1):
            x = entries[(start + length - 1) % n]
            m = np.array([[-m[0, 1], m[0, 0] + x * m[0, 1]], [-m[1, 1], m[1, 0] + x * m[1, 1]]])
            own[(start, length)] = _own_status(m, length, eps)

    kinds: Dict[Tuple[int, int], Admissibility] = {}
    for (start, length), status in sorted(own.items(), key=lambda item: item[0][1]):
        if status.strict_ok:
            kind = Admissibility.STRICT
        elif status.boundary_ok:
            kind = Admissibility.BOUNDARY
        else:
            kind = Admissibility.INADMISSIBLE
        if length > 1:
            right = ((start + 1) % n if cyclic else start + 1, length - 1)
            if (
                kinds[(start, length - 1)] is not Admissibility.STRICT
                or kinds[right] is not Admissibility.STRICT
            ):
                kind = Admissibility.INADMISSIBLE
        kinds[(start, length)] = kind
    return kinds, own


def classify_cyclic_subwords(
    entries: Sequence[float], max_length: int, eps: float = DEAD_BAND
) -> Dict[Tuple[int, int], Admissibility]:
    """
    Classify every cyclic subword of length ``1..max_length``.

    Args:
        entries: The cyclic word
        max_length: Longest subword to classify, capped at ``len(entries) - 1``
        eps: Dead band for sign tests

    Returns:
        Mapping ``(start, length) -> Admissibility`` with 0-based starts
    """
    values = _check_entries(entries)
    if len(values) < 2:
        return {}
    kinds, _ = _subword_table(values, True, min(max_length, len(values) - 1), eps)
    return kinds


def classify_admissibility(entries: Sequence[float], eps: float = DEAD_BAND) -> AdmissibilityClass:
    """
    Three-way admissibility of a word.

    Args:
        entries: Positive cross ratios
        eps: Dead band for sign tests

    Returns:
        AdmissibilityClass; on failure it names the shortest (then leftmost)
        violating subword ``(i, k)``, 1-based and inclusive, and the failed condition

    Raises:
        NonPositiveCrossRatioError: If an entry is not positive
    """
    values = _check_entries(entries)
    n = len(values)
    if n == 0:
        return AdmissibilityClass(Admissibility.STRICT, math.inf)
    kinds, own = _subword_table(values, False, n, eps)
    margin = min(status.margin for status in own.values())
    for length in range(1, n + 1):
        for start in range(n - length + 1):
            status = own[(start, length)]
            ok = status.boundary_ok if length == n else status.strict_ok
            if not ok:
                return AdmissibilityClass(
                    Admissibility.INADMISSIBLE,
                    margin,
                    (start + 1, start + length),
                    status.failed,
                )
    return AdmissibilityClass(kinds[(0, n)], margin)


def tangency_points(entries: Sequence[float], eps: float = DEAD_BAND) -> List[float]:
    """
    Tangency points ``p_2, ..., p_{k+1}`` of the fan around the real line.

    ``p_{j+1} = b_j / d_j`` for the length-``j`` prefix; ``inf`` when ``|d_j| <= eps``.
    The fan starts from ``p_0 = inf`` and ``p_1 = 0``.
    """
    values = _check_entries(entries)
    points = []
    for m in prefix_products(values)[1:]:
        b, d = float(m[0, 1]), float(m[1, 1])
        points.append(math.inf if abs(d) <= eps else b / d)
    return points


def extension_threshold(w: CrossRatioWord, side: Side, eps: float = DEAD_BAND) -> float:
    """
    Smallest cross ratio that keeps ``w`` admissible when added on ``side``.

    Args:
        w: A strictly admissible word
        side: ``left`` (``X W``), ``right`` (``W X``) or ``both`` (``X W X``)

    Returns:
        ``b/d``, ``-c/d`` or ``(b - c + sqrt((b + c)^2 + 4)) / (2 d)``; above the
        threshold the extension is strict, at it a boundary word

    Raises:
        NotStrictlyAdmissibleError: If ``w`` is not strictly admissible
    """
    verdict = classify_admissibility(w.entries, eps)
    if not verdict.is_strict:
        raise NotStrictlyAdmissibleError(
            f"Extension threshold needs a strictly admissible word, got {verdict.kind.value}",
            {"entries": list(w.entries), "violation": verdict.violation},
        )
    side = Side(side)
    b, c, d = w.b, w.c, w.d
    if side is Side.LEFT:
        return b / d
    if side is Side.RIGHT:
        return -c / d
    return (b - c + math.sqrt((b + c) ** 2 + 4.0)) / (2.0 * d)


def symmetric_value(n: int) -> float:
    """``2 cos(pi / n)``: the constant entry whose ``n``-letter word is ``-I``."""
    return 2.0 * math.cos(math.pi / n)
