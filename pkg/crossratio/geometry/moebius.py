"""
Extended complex plane, Moebius maps, generalized circles and cross ratios.

Points are Python ``complex`` values; the point at infinity is the single
constant ``INFINITY``. Any non-finite intermediate result is folded into it,
so NaN or overflow never leaves this module.

Circles are Hermitian matrices ``H`` with ``v* H v = 0`` for ``v = (z, 1)``:

    h11 |z|^2 + h12 conj(z) + conj(h12) z + h22 = 0

Lines are the ``h11 = 0`` case and need no special treatment under maps.
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np

from crossratio.core.errors import (
    DegeneratePointsError,
    InvalidCircleError,
    NonPositiveCrossRatioError,
    NotTangentError,
    VerdictError,
)

logger = logging.getLogger(__name__)

ExtendedComplex = complex

INFINITY: ExtendedComplex = complex(math.inf, 0.0)

POINT_TOLERANCE = 1e-12
TANGENCY_TOLERANCE = 1e-9
LINE_TOLERANCE = 1e-12


def is_infinite(z: ExtendedComplex) -> bool:
    """True for the point at infinity (any non-finite coordinate)."""
    return not (math.isfinite(z.real) and math.isfinite(z.imag))


def extended(z: complex) -> ExtendedComplex:
    """Fold non-finite values into ``INFINITY``."""
    z = complex(z)
    return INFINITY if is_infinite(z) else z


def points_coincide(z: ExtendedComplex, w: ExtendedComplex, tol: float = POINT_TOLERANCE) -> bool:
    if is_infinite(z) or is_infinite(w):
        return is_infinite(z) and is_infinite(w)
    return abs(z - w) <= tol


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """
    A Moebius transformation given by a complex 2x2 matrix.

    The matrix is kept as given (sign and scale included) so real SL2 lifts
    keep their sign; use ``normalized`` for the determinant-one representative
    and ``projectively_equal`` for PSL2 comparisons.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"Moebius matrix must be 2x2, got shape {m.shape}")
        if abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) == 0.0:
            raise ValueError("Moebius matrix is singular")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_entries(cls, a: complex, b: complex, c: complex, d: complex) -> "MoebiusMap":
        return cls(np.array([[a, b], [c, d]], dtype=complex))

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(np.eye(2, dtype=complex))

    @property
    def a(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def b(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def c(self) -> complex:
        return complex(self.matrix[1, 0])

    @property
    def d(self) -> complex:
        return complex(self.matrix[1, 1])

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> complex:
        return self.a + self.d

    def normalized(self) -> "MoebiusMap":
        """Representative with determinant 1 (principal square root)."""
        return MoebiusMap(self.matrix / np.sqrt(self.det))

    def inverse(self) -> "MoebiusMap":
        m = np.array([[self.d, -self.b], [-self.c, self.a]], dtype=complex)
        return MoebiusMap(m / self.det)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(self.matrix @ other.matrix)

    def __call__(self, z: ExtendedComplex) -> ExtendedComplex:
        return apply(self, z)

    def projective_distance(self, other: "MoebiusMap") -> float:
        """Entrywise max distance between normalized matrices, up to sign."""
        p = self.normalized().matrix
        q = other.normalized().matrix
        return float(min(np.max(np.abs(p - q)), np.max(np.abs(p + q))))

    def projectively_equal(self, other: "MoebiusMap", tol: float = TANGENCY_TOLERANCE) -> bool:
        return self.projective_distance(other) <= tol

    def is_real(self, tol: float = POINT_TOLERANCE) -> bool:
        return bool(np.max(np.abs(self.normalized().matrix.imag)) <= tol)

    def __repr__(self) -> str:
        return f"MoebiusMap({self.matrix.tolist()!r})"


def apply(m: MoebiusMap, z: ExtendedComplex) -> ExtendedComplex:
    """
    Apply ``m`` to a point of the extended plane.

    Args:
        m: The transformation
        z: A finite point or ``INFINITY``

    Returns:
        ``(a z + b) / (c z + d)`` with ``m(inf) = a/c`` and poles sent to infinity
    """
    a, b, c, d = m.a, m.b, m.c, m.d
    if is_infinite(z):
        if c == 0:
            return INFINITY
        return extended(a / c)
    denominator = c * z + d
    if denominator == 0:
        return INFINITY
    return extended((a * z + b) / denominator)


def cross_ratio(
    z1: ExtendedComplex,
    z2: ExtendedComplex,
    z3: ExtendedComplex,
    z4: ExtendedComplex,
    tol: float = POINT_TOLERANCE,
) -> complex:
    """
    Cross ratio ``f(z1)`` where ``f(z2) = 1``, ``f(z3) = 0``, ``f(z4) = inf``.

    Args:
        z1, z2, z3, z4: Pairwise distinct points of the extended plane
        tol: Distance below which two finite points coincide

    Returns:
        ``((z1 - z3)(z2 - z4)) / ((z1 - z4)(z2 - z3))`` with the limits at infinity

    Raises:
        DegeneratePointsError: If two of the points coincide
    """
    points = (z1, z2, z3, z4)
    for i in range(4):
        for j in range(i + 1, 4):
            if points_coincide(points[i], points[j], tol):
                raise DegeneratePointsError(
                    f"Cross ratio needs distinct points; z{i + 1} and z{j + 1} coincide",
                    {"indices": [i + 1, j + 1]},
                )
    if is_infinite(z1):
        return (z2 - z4) / (z2 - z3)
    if is_infinite(z2):
        return (z1 - z3) / (z1 - z4)
    if is_infinite(z3):
        return (z2 - z4) / (z1 - z4)
    if is_infinite(z4):
        return (z1 - z3) / (z2 - z3)
    return ((z1 - z3) * (z2 - z4)) / ((z1 - z4) * (z2 - z3))


@dataclass(frozen=True)
class GeneralizedCircle:
    """
    A circle or line, stored in canonical Hermitian form.

    Construction normalizes to unit Frobenius norm with ``h11 > 0`` for circles;
    for lines ``h11`` is snapped to 0 and the first non-zero of
    ``(Re h12, Im h12)`` is made positive.
    """

    h11: float
    h12: complex
    h22: float

    def __post_init__(self):
        h11, h12, h22 = float(self.h11), complex(self.h12), float(self.h22)
        if not (math.isfinite(h11) and math.isfinite(h22) and not is_infinite(h12)):
            raise InvalidCircleError("Hermitian entries must be finite")
        norm = math.sqrt(h11 * h11 + 2.0 * abs(h12) ** 2 + h22 * h22)
        if norm == 0.0:
            raise InvalidCircleError("Zero Hermitian matrix is not a circle")
        h11, h12, h22 = h11 / norm, h12 / norm, h22 / norm
        if abs(h11) <= LINE_TOLERANCE:
            h11 = 0.0
            lead = h12.real if abs(h12.real) > LINE_TOLERANCE else h12.imag
            if lead < 0:
                h12, h22 = -h12, -h22
        elif h11 < 0:
            h11, h12, h22 = -h11, -h12, -h22
        if h11 * h22 - abs(h12) ** 2 >= -LINE_TOLERANCE:
            raise InvalidCircleError(
                "Hermitian matrix must have negative determinant",
                {"det": h11 * h22 - abs(h12) ** 2},
            )
        object.__setattr__(self, "h11", h11 + 0.0)
        object.__setattr__(self, "h12", complex(h12.real + 0.0, h12.imag + 0.0))
        object.__setattr__(self, "h22", h22 + 0.0)

    @classmethod
    def from_matrix(cls, h: np.ndarray) -> "GeneralizedCircle":
        """Build from a (numerically) Hermitian 2x2 matrix."""
        h = np.asarray(h, dtype=complex)
        off = (h[0, 1] + np.conj(h[1, 0])) / 2.0
        return cls(float(h[0, 0].real), complex(off), float(h[1, 1].real))

    @classmethod
    def circle(cls, center: complex, radius: float) -> "GeneralizedCircle":
        if radius <= 0:
            raise InvalidCircleError(f"Radius must be positive, got {radius}")
        center = complex(center)
        return cls(1.0, -center, abs(center) ** 2 - radius * radius)

    @classmethod
    def line(cls, point: complex, direction: complex) -> "GeneralizedCircle":
        """The line through ``point`` with direction ``direction``."""
        direction = complex(direction)
        if direction == 0:
            raise InvalidCircleError("Line direction must be non-zero")
        h12 = -1j * direction
        h22 = -2.0 * (np.conj(h12) * complex(point)).real
        return cls(0.0, h12, h22)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.h11, self.h12], [np.conj(self.h12), self.h22]], dtype=complex
        )

    @property
    def det(self) -> float:
        return self.h11 * self.h22 - abs(self.h12) ** 2

    @property
    def is_line(self) -> bool:
        return self.h11 == 0.0

    @property
    def center(self) -> complex:
        return -self.h12 / self.h11

    @property
    def radius(self) -> float:
        return math.sqrt(-self.det) / self.h11

    @property
    def line_point(self) -> complex:
        return -self.h22 * self.h12 / (2.0 * abs(self.h12) ** 2)

    @property
    def line_direction(self) -> complex:
        return 1j * self.h12

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.h11, self.h12.real, self.h12.imag, self.h22)

    def distance(self, other: "GeneralizedCircle") -> float:
        """Max entry difference between canonical forms."""
        return max(abs(p - q) for p, q in zip(self.as_tuple(), other.as_tuple()))

    def contains(self, z: ExtendedComplex, tol: float = TANGENCY_TOLERANCE) -> bool:
        if is_infinite(z):
            return self.is_line
        value = self.h11 * abs(z) ** 2 + 2.0 * (np.conj(self.h12) * z).real + self.h22
        return abs(value) <= tol * max(1.0, abs(z) ** 2)


def transform_circle(m: MoebiusMap, c: GeneralizedCircle) -> GeneralizedCircle:
    """
    Image of a circle under a Moebius map.

    Args:
        m: The transformation
        c: The circle

    Returns:
        Canonical form of ``(m^-1)* H m^-1``
    """
    inv = m.inverse().matrix
    return GeneralizedCircle.from_matrix(inv.conj().T @ c.matrix @ inv)


def pencil_discriminant(c1: GeneralizedCircle, c2: GeneralizedCircle) -> float:
    """
    Discriminant of ``t -> det(H1 + t H2)``; zero exactly for tangent pairs.
    """
    middle = c1.h11 * c2.h22 + c2.h11 * c1.h22 - 2.0 * (c1.h12 * np.conj(c2.h12)).real
    return float(middle * middle - 4.0 * c1.det * c2.det)


def tangency_point(
    c1: GeneralizedCircle, c2: GeneralizedCircle, tol: float = TANGENCY_TOLERANCE
) -> ExtendedComplex:
    """
    The common point of two tangent circles.

    The degenerate member ``K = H1 + t0 H2`` of the pencil has rank one and its
    kernel vector is the tangency point.

    Args:
        c1, c2: Canonical circles
        tol: Allowed |discriminant|

    Returns:
        The tangency point (``INFINITY`` for parallel lines)

    Raises:
        NotTangentError: If the discriminant exceeds ``tol`` or the circles coincide
    """
    discriminant = pencil_discriminant(c1, c2)
    if abs(discriminant) > tol:
        raise NotTangentError(
            f"Circles are not tangent (discriminant {discriminant:.3e})",
            {"discriminant": discriminant},
        )
    if c1.distance(c2) <= tol:
        raise NotTangentError("Circles coincide", {"discriminant": discriminant})
    middle = c1.h11 * c2.h22 + c2.h11 * c1.h22 - 2.0 * (c1.h12 * np.conj(c2.h12)).real
    t0 = -middle / (2.0 * c2.det)
    k = c1.matrix + t0 * c2.matrix
    first = np.array([-k[0, 1], k[0, 0]])
    second = np.array([k[1, 1], -k[1, 0]])
    v = first if np.linalg.norm(first) >= np.linalg.norm(second) else second
    if abs(v[1]) <= POINT_TOLERANCE * max(1.0, abs(v[0])):
        return INFINITY
    return extended(v[0] / v[1])


REAL_LINE = GeneralizedCircle(0.0, 1j, 0.0)
UPPER_LINE = GeneralizedCircle(0.0, 1j, -2.0)
INNER_CIRCLE = GeneralizedCircle(1.0, -0.5j, 0.0)


def standard_interstice() -> Tuple[GeneralizedCircle, GeneralizedCircle, GeneralizedCircle]:
    """The real line, ``Im z = 1`` and ``|z - i/2| = 1/2``."""
    return REAL_LINE, UPPER_LINE, INNER_CIRCLE


def configuration_cross_ratio(
    c1: GeneralizedCircle,
    c2: GeneralizedCircle,
    c3: GeneralizedCircle,
    c4: GeneralizedCircle,
    tol: float = TANGENCY_TOLERANCE,
) -> float:
    """
    Cross ratio of a four-circle configuration.

    ``C1`` and ``C3`` share the edge; ``C2`` and ``C4`` sit on either side.
    Returns the positive ``x`` with ``(p14, p23, p12, p13) = x i``.
    """
    p14 = tangency_point(c1, c4, tol)
    p23 = tangency_point(c2, c3, tol)
    p12 = tangency_point(c1, c2, tol)
    p13 = tangency_point(c1, c3, tol)
    value = cross_ratio(p14, p23, p12, p13)
    if abs(value.real) > tol * max(1.0, abs(value)) or value.imag <= 0:
        raise VerdictError(
            "Configuration cross ratio is not a positive multiple of i",
            {"value": [value.real, value.imag]},
        )
    return float(value.imag)


def configuration_of(
    x: float, view: Literal["standard", "sideways"] = "standard"
) -> Tuple[GeneralizedCircle, GeneralizedCircle, GeneralizedCircle, GeneralizedCircle]:
    """
    A four-circle configuration with cross ratio ``x``.

    ``standard`` puts C1, C2, C3 on the standard interstice and C4 = A(x)(C3),
    touching the real line at 1/x. ``sideways`` uses the two horizontal lines
    with unit circles at 0 and at x.
    """
    if x <= 0:
        raise NonPositiveCrossRatioError(f"Cross ratio must be positive, got {x}", {"value": x})
    if view == "standard":
        shift = MoebiusMap.from_entries(0, 1, -1, x)
        return REAL_LINE, UPPER_LINE, INNER_CIRCLE, transform_circle(shift, INNER_CIRCLE)
    if view == "sideways":
        return (
            REAL_LINE,
            GeneralizedCircle.circle(complex(x, 0.5), 0.5),
            UPPER_LINE,
            INNER_CIRCLE,
        )
    raise ValueError(f"Unknown configuration view '{view}'")


def radius_cross_ratio(r2: float, r3: float, r4: float) -> float:
    """Cross ratio of three circles on a common line, read from their radii."""
    return math.sqrt(r3 / r2) + math.sqrt(r3 / r4)


def edge_geometry(x: float, tol: float = POINT_TOLERANCE) -> Tuple[str, float]:
    """
    Relative position of the two outer circles across an edge.

    Returns:
        ``("disjoint", d)`` with hyperbolic distance ``d = 2 arccosh(x)`` for x > 1,
        ``("tangent", 0.0)`` at x = 1, ``("intersecting", theta)`` with angle
        ``theta = 2 arccos(x)`` for x < 1
    """
    if x <= 0:
        raise NonPositiveCrossRatioError(f"Cross ratio must be positive, got {x}", {"value": x})
    if abs(x - 1.0) <= tol:
        return "tangent", 0.0
    if x > 1.0:
        return "disjoint", 2.0 * math.acosh(x)
    return "intersecting", 2.0 * math.acos(x)
