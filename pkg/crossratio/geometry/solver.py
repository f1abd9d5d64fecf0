"""
The cross-ratio parameter space of a one-vertex triangulation.

A point assigns a positive cross ratio to every edge. It lies in the space when
the cyclic vertex word multiplies to ``-I`` and its cyclic subwords of length up
to ``n - 2`` are strictly admissible (length ``n - 1`` may be boundary).

For genus >= 2 the three edges at a non-separating corner are determined by the
other ``6g - 6``. In the layout ``x T x y U y z V z`` the closing condition is
equivalent to three (2,2)-entry equations

    h1(x, y) = (XTX YUY)_22 = v4
    h2(y, z) = (YUY ZVZ)_22 = t4
    h3(z, x) = (ZVZ XTX)_22 = u4

which are solved by nested monotone root finding: ``x`` from ``h3`` for a trial
``z``, then ``y`` from ``h1``, and an outer search on ``z`` driving ``h2`` to
``t4``. A short Gauss-Newton polish over the closing equations of every
rotation of the word finishes the solve.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from crossratio.core.config import Settings, settings as default_settings
from crossratio.core.errors import (
    BracketNotFoundError,
    FreeValuesInadmissibleError,
    InputError,
    NonPositiveCrossRatioError,
    NotStrictlyAdmissibleError,
    OutsideConvexImageError,
    PatternMismatchError,
    PointNotInSpaceError,
    PolishNotConvergedError,
    UnknownEdgeError,
)
from crossratio.core.models import DependentSolveResult, SubwordFlag, VerificationReport
from crossratio.geometry.combinatorics import EdgeLayout, SidePairingPattern, torus_pattern
from crossratio.geometry.words import (
    Admissibility,
    Side,
    classify_admissibility,
    classify_cyclic_subwords,
    extension_threshold,
    prefix_products,
    product,
    symmetric_value,
    word_product,
    CrossRatioWord,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParameterPoint:
    """Positive cross ratios on the edges of a pattern."""

    pattern: SidePairingPattern
    values: Dict[str, float] = field(hash=False)
    layout: Optional[EdgeLayout] = None

    def value(self, label: str) -> float:
        try:
            return self.values[label]
        except KeyError:
            raise UnknownEdgeError(f"Edge '{label}' has no value", {"label": label})

    @property
    def entries(self) -> Tuple[float, ...]:
        """Cross ratios along the vertex word, side 1 first."""
        return tuple(self.values[label] for label in self.pattern.vertex_word)

    def rotated_entries(self) -> Tuple[float, ...]:
        """Cross ratios along the layout word ``x T x y U y z V z``."""
        if self.layout is None:
            raise InputError("Point has no dependent layout")
        return tuple(self.values[label] for label in self.layout.word)


def make_point(
    pattern: SidePairingPattern,
    values: Mapping[str, float],
    layout: Optional[EdgeLayout] = None,
) -> ParameterPoint:
    """
    Validate edge values and build a point.

    Raises:
        UnknownEdgeError: If a label is not an edge of the pattern
        InputError: If an edge is missing
        NonPositiveCrossRatioError: If a value is not positive
    """
    edges = pattern.edges
    unknown = sorted(set(values) - set(edges))
    if unknown:
        raise UnknownEdgeError(f"Unknown edge labels {unknown}", {"labels": unknown})
    missing = [label for label in edges if label not in values]
    if missing:
        raise InputError(f"Missing values for edges {missing}", {"labels": missing})
    clean: Dict[str, float] = {}
    for label in edges:
        v = float(values[label])
        if not (math.isfinite(v) and v > 0):
            raise NonPositiveCrossRatioError(
                f"Edge '{label}' must have a positive cross ratio, got {v}", {"label": label}
            )
        clean[label] = v
    if layout is not None and layout.pattern != pattern:
        raise PatternMismatchError("Layout belongs to a different pattern")
    return ParameterPoint(pattern, clean, layout)


def _rotation(entries: Sequence[float], start: int) -> Tuple[float, ...]:
    return tuple(entries[start:]) + tuple(entries[:start])


def rotation_residuals(entries: Sequence[float]) -> np.ndarray:
    """
    Max-norm of ``W_s + I`` for every cyclic rotation ``s`` of the word.

    Each ``W_s`` is normalized to determinant 1. The rotations are conjugate,
    but an error in one of them is amplified by the prefix products in the
    others, so a closed word has to be checked in all of them.
    """
    out = np.empty(len(entries))
    for start in range(len(entries)):
        w = product(_rotation(entries, start))
        det = w[0, 0] * w[1, 1] - w[0, 1] * w[1, 0]
        w = w / math.sqrt(det)
        out[start] = np.max(np.abs(w + np.eye(2)))
    return out


def word_residual(entries: Sequence[float]) -> float:
    """Largest closing residual over the cyclic rotations of the word."""
    return float(np.max(rotation_residuals(entries)))


def verify_point(
    point: ParameterPoint,
    tol: Optional[float] = None,
    eps: Optional[float] = None,
) -> VerificationReport:
    """
    Check the closing and admissibility conditions at the vertex.

    Args:
        point: The parameter point
        tol: Residual tolerance (default: acceptance tolerance)
        eps: Dead band for the subword sign tests (default: acceptance tolerance,
            since the length ``n - 1`` subwords have ``d`` of the order of the residual)

    Returns:
        VerificationReport; never raises on mathematical failure
    """
    tol = default_settings.acceptance_tolerance if tol is None else tol
    eps = default_settings.acceptance_tolerance if eps is None else eps
    entries = point.entries
    n = len(entries)
    residual = word_residual(entries)
    kinds = classify_cyclic_subwords(entries, n - 1, eps)
    flags = [
        SubwordFlag(start=start + 1, length=length, kind=kind.value)
        for (start, length), kind in sorted(kinds.items(), key=lambda item: (item[0][1], item[0][0]))
    ]
    by_length: Dict[int, str] = {}
    order = [Admissibility.STRICT, Admissibility.BOUNDARY, Admissibility.INADMISSIBLE]
    for (_, length), kind in kinds.items():
        current = by_length.get(length, Admissibility.STRICT.value)
        worst = max(order.index(Admissibility(current)), order.index(kind))
        by_length[length] = order[worst].value

    short = [kind for (_, length), kind in kinds.items() if length <= n - 2]
    long = [kind for (_, length), kind in kinds.items() if length == n - 1]
    closes = residual <= tol
    if closes and all(k is Admissibility.STRICT for k in short) and all(
        k is not Admissibility.INADMISSIBLE for k in long
    ):
        verdict = "in-space"
    elif closes and _only_boundary_failures(entries, n, eps):
        verdict = "boundary"
    else:
        verdict = "out"
    logger.debug("verify: residual %.3e, verdict %s", residual, verdict)
    return VerificationReport(
        residual=residual, verdict=verdict, subwords=flags, by_length=by_length
    )


def _only_boundary_failures(entries: Sequence[float], n: int, eps: float) -> bool:
    """True when every cyclic subword satisfies its sign conditions with d = 0 allowed."""
    for start in range(n):
        for length in range(1, n):
            sub = [entries[(start + k) % n] for k in range(length)]
            w = product(sub)
            if length > 1 and -w[0, 0] <= eps:
                return False
            if w[0, 1] <= eps or -w[1, 0] <= eps or w[1, 1] < -eps:
                return False
    return True


# Torus

def torus_dependent(x: float, y: float) -> float:
    """
    The third torus cross ratio: ``z = (x + y) / (xy - 1)``, from ``xyz = x + y + z``.

    Raises:
        NonPositiveCrossRatioError: If ``x`` or ``y`` is not positive
        OutsideConvexImageError: If ``xy <= 1``
    """
    for name, v in (("x", x), ("y", y)):
        if not (math.isfinite(v) and v > 0):
            raise NonPositiveCrossRatioError(f"{name} must be positive, got {v}", {name: v})
    if x * y <= 1.0:
        raise OutsideConvexImageError(
            f"Torus coordinates need xy > 1, got xy = {x * y}", {"x": x, "y": y}
        )
    return (x + y) / (x * y - 1.0)


def torus_point(x: float, y: float, z: Optional[float] = None) -> ParameterPoint:
    """Point on the hexagonal torus pattern; ``z`` defaults to the dependent value."""
    if z is None:
        z = torus_dependent(x, y)
    return make_point(torus_pattern(), {"e1": x, "e2": y, "e3": z})


def symmetric_point(pattern: SidePairingPattern, layout: Optional[EdgeLayout] = None) -> ParameterPoint:
    """Every edge ``2 cos(pi / N)``: the constant-curvature solution."""
    value = symmetric_value(pattern.sides)
    return make_point(pattern, {label: value for label in pattern.edges}, layout)


# Genus >= 2 dependent triple

def _a(x: float) -> np.ndarray:
    return np.array([[0.0, 1.0], [-1.0, x]])


def _sandwich(x: float, inner: np.ndarray) -> np.ndarray:
    return _a(x) @ inner @ _a(x)


class DependentSystem:
    """
    The three (2,2)-entry equations of a layout with fixed free values.

    Exposes the nested monotone maps ``x_of_z``, ``y_of_x`` and the outer
    function ``outer(z) = h2(y(x(z)), z) - t4`` whose unique zero above ``gamma``
    gives the dependent triple.
    """

    def __init__(self, layout: EdgeLayout, free: Mapping[str, float], config: Optional[Settings] = None):
        self.layout = layout
        self.config = config or default_settings
        dependent = set(layout.dependent)
        ignored = sorted(set(free) & dependent)
        if ignored:
            logger.warning("ignoring values given for dependent edges %s", ignored)
        known = set(layout.pattern.edges)
        unknown = sorted(set(free) - known)
        if unknown:
            raise UnknownEdgeError(f"Unknown edge labels {unknown}", {"labels": unknown})
        missing = [label for label in layout.free_labels if label not in free]
        if missing:
            raise InputError(f"Missing free values for {missing}", {"labels": missing})
        self.free = {label: float(free[label]) for label in layout.free_labels}

        words = {}
        for name, labels in (("T", layout.t_labels), ("U", layout.u_labels), ("V", layout.v_labels)):
            word = word_product([self.free[label] for label in labels])
            verdict = classify_admissibility(word.entries, self.config.dead_band)
            if not verdict.is_strict:
                raise FreeValuesInadmissibleError(
                    f"Free values make {name} {verdict.kind.value}",
                    {"word": name, "violation": verdict.violation, "condition": verdict.condition},
                )
            words[name] = word
        self.T, self.U, self.V = words["T"].product, words["U"].product, words["V"].product
        self.alpha = extension_threshold(words["T"], Side.BOTH, self.config.dead_band)
        self.beta = extension_threshold(words["U"], Side.BOTH, self.config.dead_band)
        self.gamma = extension_threshold(words["V"], Side.BOTH, self.config.dead_band)
        self.evaluations = 0

    @property
    def thresholds(self) -> Tuple[float, float, float]:
        return self.alpha, self.beta, self.gamma

    def h1(self, x: float, y: float) -> float:
        return float((_sandwich(x, self.T) @ _sandwich(y, self.U))[1, 1])

    def h2(self, y: float, z: float) -> float:
        return float((_sandwich(y, self.U) @ _sandwich(z, self.V))[1, 1])

    def h3(self, z: float, x: float) -> float:
        return float((_sandwich(z, self.V) @ _sandwich(x, self.T))[1, 1])

    def _root(self, f: Callable[[float], float], lo: float, hi: float) -> float:
        method = optimize.brentq if self.config.root_method == "brentq" else optimize.bisect
        return float(method(f, lo, hi, xtol=self.config.root_xtol, maxiter=500))

    def _grow(self, f: Callable[[float], float], base: float, what: str) -> float:
        """Smallest ``base + w g^k`` (k = 0, 1, ...) with ``f > 0``."""
        width = self.config.bracket_initial_width
        for _ in range(self.config.max_bracket_doublings):
            trial = base + width
            if f(trial) > 0:
                return trial
            width *= self.config.bracket_growth
        raise BracketNotFoundError(
            f"No upper bracket for {what} in ({base}, {base + width}]",
            {"variable": what, "scan": [base, base + width]},
        )

    def x_of_z(self, z: float) -> float:
        """The ``x > alpha`` with ``h3(z, x) = u4``."""
        u4 = self.U[1, 1]

        def f(x: float) -> float:
            return self.h3(z, x) - u4

        hi = self._grow(f, self.alpha, "x")
        return self._root(f, self.alpha, hi)

    def y_of_x(self, x: float) -> float:
        """The ``y > beta`` with ``h1(x, y) = v4``."""
        v4 = self.V[1, 1]

        def f(y: float) -> float:
            return self.h1(x, y) - v4

        hi = self._grow(f, self.beta, "y")
        return self._root(f, self.beta, hi)

    def outer(self, z: float) -> float:
        self.evaluations += 1
        y = self.y_of_x(self.x_of_z(z))
        return self.h2(y, z) - self.T[1, 1]

    def __call__(self, z: float) -> float:
        return self.outer(z)

    def bracket(self) -> Tuple[float, float]:
        """``(lo, hi)`` above ``gamma`` with ``outer(lo) < 0 < outer(hi)``."""
        width = self.config.bracket_initial_width
        growth = self.config.bracket_growth
        lo = None
        for k in range(self.config.max_bracket_doublings):
            trial = self.gamma + width / growth**k
            if self.outer(trial) < 0:
                lo = trial
                break
        if lo is None:
            raise BracketNotFoundError(
                f"No lower bracket for z in ({self.gamma}, {self.gamma + width}]",
                {"variable": "z", "scan": [self.gamma, self.gamma + width]},
            )
        hi = self._grow(self.outer, self.gamma, "z")
        logger.debug("z bracket [%.6g, %.6g] above gamma %.6g", lo, hi, self.gamma)
        return lo, hi

    def linearization(self, x: float, y: float, z: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        Stacked residuals ``(a + 1, b, c)`` of every rotation with their exact
        derivatives in ``(x, y, z)``.

        Rows of rotation ``s`` are divided by ``max_k |P_k| |S_k|``, the scale of
        the rounding error in its product, so every rotation is trusted as far
        as it can be evaluated.
        """
        entries = self.rotated_entries(x, y, z)
        labels = self.layout.word
        column = {label: k for k, label in enumerate(self.layout.dependent)}
        n = len(entries)
        rows, rhs = [], []
        for start in range(n):
            word = _rotation(entries, start)
            names = _rotation(labels, start)
            prefixes = prefix_products(word)
            suffix = np.eye(2)
            suffixes = [None] * n
            for k in range(n - 1, -1, -1):
                suffixes[k] = suffix
                suffix = _a(word[k]) @ suffix
            w = prefixes[n]
            jac = np.zeros((3, 3))
            scale = 1.0
            for k, name in enumerate(names):
                p, s = prefixes[k], suffixes[k]
                scale = max(scale, float(np.max(np.abs(p)) * np.max(np.abs(s))))
                if name in column:
                    d = np.outer(p[:, 1], s[1, :])
                    jac[:, column[name]] += (d[0, 0], d[0, 1], d[1, 0])
            rows.append(jac / scale)
            rhs.append(np.array([w[0, 0] + 1.0, w[0, 1], w[1, 0]]) / scale)
        return np.vstack(rows), np.concatenate(rhs)

    def rotated_entries(self, x: float, y: float, z: float) -> Tuple[float, ...]:
        values = dict(self.free)
        values.update({self.layout.x: x, self.layout.y: y, self.layout.z: z})
        return tuple(values[label] for label in self.layout.word)


def dependent_thresholds(
    layout: EdgeLayout, free: Mapping[str, float], config: Optional[Settings] = None
) -> Tuple[float, float, float]:
    """
    Thresholds ``(alpha, beta, gamma)`` above which ``XTX``, ``YUY``, ``ZVZ`` are strict.

    Raises:
        FreeValuesInadmissibleError: If ``T``, ``U`` or ``V`` is not strictly admissible
    """
    return DependentSystem(layout, free, config).thresholds


def dependent_function(
    layout: EdgeLayout, free: Mapping[str, float], config: Optional[Settings] = None
) -> DependentSystem:
    """The callable ``z -> h2(y(x(z)), z) - t4`` with its inner maps ``x_of_z``, ``y_of_x``."""
    return DependentSystem(layout, free, config)


def free_values_from_point(point: ParameterPoint) -> Dict[str, float]:
    """Values of the free edges of a point with a layout."""
    if point.layout is None:
        raise InputError("Point has no dependent layout")
    return {label: point.values[label] for label in point.layout.free_labels}


def _closed_form_jacobian(layout: EdgeLayout, entries: Sequence[float]) -> np.ndarray:
    """
    Jacobian of ``(a, b, c)`` with respect to ``(x, y, z)`` at ``W = -I``.

    Each occurrence of a variable at position ``k`` contributes
    ``(-b d, b^2, -d^2)`` of the prefix ``W_{k-1}``.
    """
    prefixes = prefix_products(entries)
    jac = np.zeros((3, 3))
    for column, label in enumerate(layout.dependent):
        for position in layout.positions(label):
            p = prefixes[position - 1]
            b, d = p[0, 1], p[1, 1]
            jac[:, column] += (-b * d, b * b, -d * d)
    return jac


def jacobian_dependent(layout: EdgeLayout, point: ParameterPoint) -> np.ndarray:
    """
    Closed-form Jacobian of ``(a, b, c)`` in the dependent variables.

    Raises:
        PatternMismatchError: If the layout belongs to another pattern
        PointNotInSpaceError: If the point does not verify in-space
    """
    if layout.pattern != point.pattern:
        raise PatternMismatchError("Layout and point use different patterns")
    report = verify_point(point)
    if report.verdict != "in-space":
        raise PointNotInSpaceError(
            f"Jacobian needs an in-space point, verdict is {report.verdict}",
            {"residual": report.residual, "verdict": report.verdict},
        )
    entries = tuple(point.values[label] for label in layout.word)
    return _closed_form_jacobian(layout, entries)


def _polish(system: DependentSystem, start: Tuple[float, float, float]) -> Tuple[Tuple[float, float, float], float, int]:
    """
    Gauss-Newton on the closing equations of all rotations at once.

    Stops at the polish tolerance, after the iteration limit or when a step no
    longer lowers the largest rotation residual; the best triple seen is kept.
    """
    config = system.config
    best = tuple(float(v) for v in start)
    best_residual = word_residual(system.rotated_entries(*best))
    current = np.array(best)
    iterations = 0
    while best_residual > config.polish_tolerance and iterations < config.max_polish_iterations:
        iterations += 1
        jac, rhs = system.linearization(*current)
        step, _, rank, _ = np.linalg.lstsq(jac, -rhs, rcond=None)
        if rank < 3:
            logger.warning("rank-deficient linearization during polish at %s", current.tolist())
            break
        candidate = current + step
        if np.any(candidate <= 0):
            logger.warning("Newton step left the positive orthant; keeping best point")
            break
        residual = word_residual(system.rotated_entries(*candidate))
        logger.debug("polish %d: residual %.3e", iterations, residual)
        current = candidate
        if residual < best_residual:
            best, best_residual = tuple(float(v) for v in candidate), residual
        else:
            break
    return best, best_residual, iterations


def solve_dependent_triple(
    layout: EdgeLayout, free: Mapping[str, float], config: Optional[Settings] = None
) -> DependentSolveResult:
    """
    The unique dependent triple ``(x, y, z)`` above the thresholds.

    Args:
        layout: Dependent layout of a genus >= 2 pattern
        free: Values of the ``6g - 6`` free edges
        config: Solver settings (default: global settings)

    Returns:
        DependentSolveResult with the triple, thresholds and final residual

    Raises:
        FreeValuesInadmissibleError: If ``T``, ``U`` or ``V`` is not strict
        BracketNotFoundError: If a monotone bracket cannot be grown
        PolishNotConvergedError: If some rotation still misses the acceptance
            tolerance after the polish
    """
    system = DependentSystem(layout, free, config)
    lo, hi = system.bracket()
    z = system._root(system.outer, lo, hi)
    x = system.x_of_z(z)
    y = system.y_of_x(x)
    (x, y, z), residual, iterations = _polish(system, (x, y, z))
    if residual > system.config.acceptance_tolerance:
        raise PolishNotConvergedError(
            f"Dependent triple closes only to {residual:.3e} over all rotations",
            {"triple": [x, y, z], "residual": residual, "iterations": iterations},
        )
    logger.info(
        "dependent triple (%.12g, %.12g, %.12g), residual %.3e after %d outer evaluations",
        x, y, z, residual, system.evaluations,
    )
    return DependentSolveResult(
        labels=list(layout.dependent),
        x=x,
        y=y,
        z=z,
        alpha=system.alpha,
        beta=system.beta,
        gamma=system.gamma,
        iterations=iterations,
        evaluations=system.evaluations,
        residual=residual,
    )


def assemble_point(
    layout: EdgeLayout, free: Mapping[str, float], triple: Tuple[float, float, float]
) -> ParameterPoint:
    values = {label: float(free[label]) for label in layout.free_labels}
    values.update(dict(zip(layout.dependent, triple)))
    return make_point(layout.pattern, values, layout)


def solve_point(
    layout: EdgeLayout, free: Mapping[str, float], config: Optional[Settings] = None
) -> Tuple[ParameterPoint, DependentSolveResult]:
    result = solve_dependent_triple(layout, free, config)
    return assemble_point(layout, free, (result.x, result.y, result.z)), result


def triple_identity_check(
    a: CrossRatioWord, b: CrossRatioWord, c: CrossRatioWord, tol: Optional[float] = None
) -> bool:
    """
    Whether the (2,2) entries of ``AB``, ``BC``, ``CA`` match ``-C^-1``, ``-A^-1``, ``-B^-1``.

    For strictly admissible words this holds exactly when ``ABC = -I``.

    Raises:
        NotStrictlyAdmissibleError: If one of the words is not strictly admissible
    """
    tol = default_settings.acceptance_tolerance if tol is None else tol
    for name, word in (("A", a), ("B", b), ("C", c)):
        verdict = classify_admissibility(word.entries)
        if not verdict.is_strict:
            raise NotStrictlyAdmissibleError(
                f"Word {name} is {verdict.kind.value}", {"word": name, "violation": verdict.violation}
            )
    pa, pb, pc = a.product, b.product, c.product
    checks = (
        ((pa @ pb)[1, 1], -pc[0, 0]),
        ((pb @ pc)[1, 1], -pa[0, 0]),
        ((pc @ pa)[1, 1], -pb[0, 0]),
    )
    return all(abs(lhs - rhs) <= tol for lhs, rhs in checks)


def layout_words(point: ParameterPoint) -> Tuple[CrossRatioWord, CrossRatioWord, CrossRatioWord]:
    """The words ``XTX``, ``YUY``, ``ZVZ`` of a point with a layout."""
    layout = point.layout
    if layout is None:
        raise InputError("Point has no dependent layout")

    def word(letter: str, labels: Sequence[str]) -> CrossRatioWord:
        values = [point.values[letter]] + [point.values[k] for k in labels] + [point.values[letter]]
        return word_product(values)

    return word(layout.x, layout.t_labels), word(layout.y, layout.u_labels), word(layout.z, layout.v_labels)
