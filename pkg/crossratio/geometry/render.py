"""
SVG rendering of developed scenes.

Output is byte-deterministic: elements follow address order and numbers are
printed with 12 significant digits. The SVG y axis points down, so the
imaginary part is negated.
"""
import logging
from typing import List, Optional, Tuple

from crossratio.core.config import Settings, settings as default_settings
from crossratio.core.errors import InputError
from crossratio.geometry.develop import PackingScene
from crossratio.geometry.moebius import GeneralizedCircle

logger = logging.getLogger(__name__)


def _num(value: float) -> str:
    if abs(value) < 1e-12:
        value = 0.0
    text = format(value, ".12g")
    return "0" if text == "-0" else text


def _clip_line(
    point: complex, direction: complex, low: Tuple[float, float], high: Tuple[float, float]
) -> Optional[Tuple[complex, complex]]:
    """Liang-Barsky clip of an infinite line to the box ``low``..``high``."""
    t0, t1 = -float("inf"), float("inf")
    for p, d, lo, hi in (
        (point.real, direction.real, low[0], high[0]),
        (point.imag, direction.imag, low[1], high[1]),
    ):
        if abs(d) < 1e-15:
            if p < lo or p > hi:
                return None
            continue
        a, b = (lo - p) / d, (hi - p) / d
        if a > b:
            a, b = b, a
        t0, t1 = max(t0, a), min(t1, b)
        if t0 > t1:
            return None
    return point + t0 * direction, point + t1 * direction


def _circle_visible(circle: GeneralizedCircle, low, high) -> bool:
    c, r = circle.center, circle.radius
    return not (
        c.real + r < low[0] or c.real - r > high[0] or c.imag + r < low[1] or c.imag - r > high[1]
    )


def render_svg(
    scene: PackingScene,
    center: complex = 0j,
    half_width: float = 2.0,
    min_radius: Optional[float] = None,
    stroke_width: Optional[float] = None,
    config: Optional[Settings] = None,
) -> str:
    """
    Render circles and lines inside a square viewport.

    Args:
        scene: The developed scene
        center: Viewport center
        half_width: Half the side length of the viewport (> 0)
        min_radius: Circles with smaller radius are omitted
        stroke_width: Stroke width in scene units

    Returns:
        SVG document text ending in a newline
    """
    config = config or default_settings
    if not half_width > 0:
        raise InputError(f"Viewport half-width must be positive, got {half_width}")
    min_radius = config.svg_min_radius if min_radius is None else min_radius
    stroke_width = config.svg_stroke_width if stroke_width is None else stroke_width
    center = complex(center)
    h = float(half_width)
    low = (center.real - h, center.imag - h)
    high = (center.real + h, center.imag + h)

    lines: List[str] = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_num(low[0])} {_num(-high[1])} {_num(2 * h)} {_num(2 * h)}">',
        f'<g fill="none" stroke="black" stroke-width="{_num(stroke_width)}">',
        f'<rect x="{_num(low[0])}" y="{_num(-high[1])}" width="{_num(2 * h)}" height="{_num(2 * h)}"/>',
    ]
    skipped = 0
    for _, circle in scene.sorted_circles():
        if circle.is_line:
            segment = _clip_line(circle.line_point, circle.line_direction, low, high)
            if segment is None:
                continue
            a, b = segment
            lines.append(
                f'<line x1="{_num(a.real)}" y1="{_num(-a.imag)}" x2="{_num(b.real)}" y2="{_num(-b.imag)}"/>'
            )
            continue
        if circle.radius < min_radius:
            skipped += 1
            continue
        if not _circle_visible(circle, low, high):
            continue
        c = circle.center
        lines.append(f'<circle cx="{_num(c.real)}" cy="{_num(-c.imag)}" r="{_num(circle.radius)}"/>')
    lines.append("</g>")
    lines.append("</svg>")
    logger.debug("rendered %d elements, %d below the radius cutoff", len(lines) - 5, skipped)
    return "\n".join(lines) + "\n"
