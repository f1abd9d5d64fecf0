"""
Command pipelines.

Every subcommand is a list of async steps that read and update one state dict:

- ``state["options"]``: parsed command-line options
- ``state["settings"]``: active Settings
- ``state["stdout"]``: text chunks printed on success or verdict failure
- ``state["files"]``: output path -> text, written atomically by the runner
- ``state["failure"]``: a verdict error to report after printing the output
"""
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from crossratio.core.errors import (
    InadmissibleWordError,
    InputError,
    NotStrictlyAdmissibleError,
    PointNotInSpaceError,
    RigidityDifferentError,
)
from crossratio.core.models import (
    AdmissibilityReport,
    CensusReport,
    FreeValuesFile,
    ParamsFile,
    PatternFile,
    TorusReport,
)
from crossratio.db.file_store import dump_json, store
from crossratio.geometry.combinatorics import (
    enumerate_patterns,
    layout_for,
    pattern_from_dict,
    select_dependent_triple,
)
from crossratio.geometry.develop import develop, scene_to_json, tangency_audit
from crossratio.geometry.holonomy import rigidity_compare, torus_traces
from crossratio.geometry.render import render_svg
from crossratio.geometry.solver import (
    ParameterPoint,
    make_point,
    solve_point,
    torus_dependent,
    torus_point,
    verify_point,
)
from crossratio.geometry.words import (
    Side,
    classify_admissibility,
    extension_threshold,
    tangency_points,
    word_product,
)

logger = logging.getLogger(__name__)

_MODULE = __name__


def _print(state: Dict[str, Any], text: str) -> None:
    state["stdout"].append(text if text.endswith("\n") else text + "\n")


def _load_pattern(value: Any, base: Optional[Path] = None):
    """A pattern object, or a path (relative to ``base``) to a pattern file."""
    if isinstance(value, PatternFile):
        return pattern_from_dict(value.model_dump())
    path = Path(value)
    if base is not None and not path.is_absolute():
        path = base / path
    data = store.read_json(path)
    return pattern_from_dict(PatternFile.model_validate(data).model_dump())


def read_point(path: str) -> ParameterPoint:
    """
    Load a parameter file.

    The dependent triple defaults to the first non-separating corner for genus >= 2.
    """
    params = ParamsFile.model_validate(store.read_json(path))
    pattern = _load_pattern(params.pattern, Path(path).parent)
    layout = None
    if params.dependent is not None:
        layout = layout_for(pattern, params.dependent)
    elif pattern.genus >= 2:
        layout = select_dependent_triple(pattern)
    return make_point(pattern, params.values, layout)


def _point_document(point: ParameterPoint) -> Dict[str, Any]:
    document: Dict[str, Any] = {"pattern": point.pattern.to_dict(), "values": dict(point.values)}
    if point.layout is not None:
        document["dependent"] = list(point.layout.dependent)
    return document


# patterns

async def enumerate_census(state: Dict[str, Any]) -> Dict[str, Any]:
    options = state["options"]
    genus = int(options["genus"])
    workers = options.get("workers") or state["settings"].enumeration_workers
    patterns = enumerate_patterns(genus, workers=workers)
    state["patterns"] = patterns
    state["summary"] = f"{len(patterns)} patterns for genus {genus}"
    return state


async def emit_census(state: Dict[str, Any]) -> Dict[str, Any]:
    patterns = state["patterns"]
    report = CensusReport(
        genus=int(state["options"]["genus"]),
        count=len(patterns),
        patterns=[PatternFile.model_validate(p.to_dict()) for p in patterns],
    )
    document = [p.model_dump(exclude_none=True) for p in report.patterns]
    _print(state, f"count: {report.count}")
    out = state["options"].get("out")
    if out:
        state["files"][out] = dump_json(document)
    else:
        state["stdout"].append(dump_json(document))
    return state


# admissible

async def parse_vector(state: Dict[str, Any]) -> Dict[str, Any]:
    text = state["options"]["vector"]
    try:
        entries = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InputError(f"Cannot parse vector '{text}'", {"vector": text})
    if not entries:
        raise InputError("Vector is empty")
    state["entries"] = entries
    return state


async def classify_vector(state: Dict[str, Any]) -> Dict[str, Any]:
    entries = state["entries"]
    eps = state["options"].get("eps")
    band = state["settings"].acceptance_tolerance if eps is None else float(eps)
    verdict = classify_admissibility(entries, band)
    report = AdmissibilityReport(
        entries=entries,
        kind=verdict.kind.value,
        margin=verdict.margin,
        violation=list(verdict.violation) if verdict.violation else None,
        condition=verdict.condition,
        tangency_points=[None if p == float("inf") else p for p in tangency_points(entries, band)],
    )
    side = state["options"].get("threshold")
    if side:
        if verdict.is_strict:
            report.threshold = extension_threshold(word_product(entries), Side(side), band)
        else:
            state["failure"] = NotStrictlyAdmissibleError(
                f"No extension threshold for a {verdict.kind.value} word",
                {"violation": report.violation},
            )
    if not verdict.is_admissible:
        state["failure"] = InadmissibleWordError(
            f"Word fails '{verdict.condition}' on subword {report.violation}",
            {"violation": report.violation, "condition": verdict.condition},
        )
    _print(state, report.kind)
    state["stdout"].append(dump_json(report.model_dump()))
    state["summary"] = report.kind
    return state


# torus

async def solve_torus(state: Dict[str, Any]) -> Dict[str, Any]:
    options = state["options"]
    x, y = float(options["x"]), float(options["y"])
    z = torus_dependent(x, y)
    point = torus_point(x, y, z)
    report = verify_point(point, state["settings"].acceptance_tolerance)
    traces = None
    if options.get("traces") and report.verdict == "in-space":
        traces = [[t.real, t.imag] for t in torus_traces(x, y, z)]
    torus = TorusReport(x=x, y=y, z=z, verification=report, traces=traces)
    state["stdout"].append(dump_json(torus.model_dump()))
    state["point"] = point
    if report.verdict != "in-space":
        state["failure"] = PointNotInSpaceError(
            f"Torus point is {report.verdict}", {"residual": report.residual, "verdict": report.verdict}
        )
    state["summary"] = f"z = {z!r}, {report.verdict}"
    return state


# solve

async def load_pattern_file(state: Dict[str, Any]) -> Dict[str, Any]:
    state["pattern"] = _load_pattern(state["options"]["pattern"])
    return state


async def solve_triple(state: Dict[str, Any]) -> Dict[str, Any]:
    pattern = state["pattern"]
    free = FreeValuesFile.model_validate(store.read_json(state["options"]["free"]))
    layout = layout_for(pattern, free.dependent) if free.dependent else select_dependent_triple(pattern)
    point, result = solve_point(layout, free.values, state["settings"])
    state["point"] = point
    state["stdout"].append(dump_json(result.model_dump()))
    out = state["options"].get("out")
    if out:
        state["files"][out] = dump_json(_point_document(point))
    state["summary"] = f"residual {result.residual:.3e}"
    return state


# verify

async def load_params(state: Dict[str, Any]) -> Dict[str, Any]:
    state["point"] = read_point(state["options"]["params"])
    return state


async def verify_params(state: Dict[str, Any]) -> Dict[str, Any]:
    report = verify_point(state["point"], state["settings"].acceptance_tolerance)
    state["stdout"].append(dump_json(report.model_dump()))
    if report.verdict != "in-space":
        state["failure"] = PointNotInSpaceError(
            f"Point is {report.verdict}", {"residual": report.residual, "verdict": report.verdict}
        )
    state["summary"] = report.verdict
    return state


# holonomy

async def compare_holonomy(state: Dict[str, Any]) -> Dict[str, Any]:
    other = read_point(state["options"]["compare"])
    report = rigidity_compare(state["point"], other, state["settings"].acceptance_tolerance)
    state["stdout"].append(dump_json(report.model_dump()))
    if state["options"].get("require_equal") and report.verdict != "equal":
        state["failure"] = RigidityDifferentError(
            "Holonomy traces differ", {"generators": report.generators}
        )
    state["summary"] = report.verdict
    return state


# develop

def _viewport(options: Dict[str, Any]) -> Tuple[complex, float]:
    text = options.get("center")
    text = "0,0.5" if text is None else text
    try:
        re_part, im_part = (float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"Center must be 're,im', got '{text}'", {"center": text})
    if not (math.isfinite(re_part) and math.isfinite(im_part)):
        raise InputError(f"Center must be finite, got '{text}'", {"center": text})
    half_width = options.get("half_width")
    half_width = 2.0 if half_width is None else float(half_width)
    if not (math.isfinite(half_width) and half_width > 0):
        raise InputError(f"Viewport half-width must be positive, got {half_width}", {"half_width": half_width})
    min_radius = options.get("min_radius")
    if min_radius is not None and not (math.isfinite(min_radius) and min_radius >= 0):
        raise InputError(f"Minimum radius must be non-negative, got {min_radius}", {"min_radius": min_radius})
    return complex(re_part, im_part), half_width


async def check_viewport(state: Dict[str, Any]) -> Dict[str, Any]:
    """Reject bad rendering options before any development work."""
    options = state["options"]
    depth = options.get("depth")
    if depth is not None and depth < 0:
        raise InputError(f"Depth must be non-negative, got {depth}", {"depth": depth})
    if depth is None:
        given = [name for name in ("svg", "json") if options.get(name)]
        if given:
            raise InputError(f"--{given[0]} needs --develop", {"options": given})
    state["viewport"] = _viewport(options)
    return state


async def develop_point(state: Dict[str, Any]) -> Dict[str, Any]:
    depth = state["options"].get("depth")
    if depth is None or state.get("failure") is not None:
        return state
    scene = develop(state["point"], int(depth), state["settings"])
    state["scene"] = scene
    state["audit"] = tangency_audit(scene, state["settings"].tangency_tolerance)
    state["summary"] = f"{len(scene.interstices)} marked triangles, {len(scene.circles)} circles"
    return state


async def render_scene(state: Dict[str, Any]) -> Dict[str, Any]:
    scene = state.get("scene")
    svg = state["options"].get("svg")
    if scene is None or not svg:
        return state
    center, half_width = state["viewport"]
    state["files"][svg] = render_svg(
        scene,
        center,
        half_width,
        min_radius=state["options"].get("min_radius"),
        config=state["settings"],
    )
    return state


async def emit_scene(state: Dict[str, Any]) -> Dict[str, Any]:
    scene = state.get("scene")
    if scene is None:
        return state
    audit = state["audit"]
    document = scene_to_json(scene, state["settings"].tangency_tolerance)
    document["audit"] = audit.model_dump()
    out = state["options"].get("json")
    if out:
        state["files"][out] = dump_json(document)
    if state["command"] == "develop":
        state["stdout"].append(dump_json(audit.model_dump()))
    return state


PIPELINES: Dict[str, List[str]] = {
    name: [f"{_MODULE}.{step}" for step in steps]
    for name, steps in {
        "patterns": ["enumerate_census", "emit_census"],
        "admissible": ["parse_vector", "classify_vector"],
        "torus": ["check_viewport", "solve_torus", "develop_point", "render_scene", "emit_scene"],
        "solve": ["load_pattern_file", "solve_triple"],
        "verify": ["load_params", "verify_params"],
        "holonomy": ["load_params", "compare_holonomy"],
        "develop": ["check_viewport", "load_params", "develop_point", "render_scene", "emit_scene"],
    }.items()
}
