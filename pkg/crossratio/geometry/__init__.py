"""
Geometry: Moebius maps, cross-ratio words, side-pairing patterns, the dependent
solver, holonomy and development.
"""
from crossratio.geometry.moebius import MoebiusMap, GeneralizedCircle, cross_ratio, standard_interstice
from crossratio.geometry.words import Admissibility, classify_admissibility, extension_threshold, word_product
from crossratio.geometry.combinatorics import (
    SidePairingPattern,
    build_pattern,
    enumerate_patterns,
    select_dependent_triple,
    torus_pattern,
)
from crossratio.geometry.solver import ParameterPoint, solve_dependent_triple, verify_point
from crossratio.geometry.holonomy import holonomy_of, rigidity_compare, torus_traces
from crossratio.geometry.develop import develop, tangency_audit
from crossratio.geometry.render import render_svg

__all__ = [
    "MoebiusMap",
    "GeneralizedCircle",
    "cross_ratio",
    "standard_interstice",
    "Admissibility",
    "classify_admissibility",
    "extension_threshold",
    "word_product",
    "SidePairingPattern",
    "build_pattern",
    "enumerate_patterns",
    "select_dependent_triple",
    "torus_pattern",
    "ParameterPoint",
    "solve_dependent_triple",
    "verify_point",
    "holonomy_of",
    "rigidity_compare",
    "torus_traces",
    "develop",
    "tangency_audit",
    "render_svg",
]
