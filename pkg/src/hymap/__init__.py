"""Cognitive-map driven hypothesis engineering for early-stage startups.

Capture a founder's product understanding as a typed, layered acyclic
graph, compile every relationship into a testable hypothesis (problem,
value, or product), and track validation status, risk, and evidence over
time. Ships a text format, a guided elicitation session, diagram
renderers, a CLI, and an HTTP service.
"""

from .model import (
    CognitiveMap,
    Diagnostic,
    EdgeKind,
    MapEdge,
    MapError,
    MapNode,
    NodeKind,
    Sign,
)
from .analysis import HypothesisKind, InvalidMap, assign_layers, categorize, structure_report
from .dsl import ParseDiagnostic, ParseResult, export_json, import_json, parse, serialize
from .elicitation import ElicitationSession, Phase, Prompt
from .hypogen import Hypothesis, generate, prioritize, regenerate
from .registry import (
    Assessment,
    AssessmentRegistry,
    Evidence,
    EvidenceSource,
    RiskLevel,
    Status,
    summary,
)
from .render import RenderOptions, layout, to_dot, to_svg

__version__ = "0.1.0"

__all__ = [
    "Assessment",
    "AssessmentRegistry",
    "CognitiveMap",
    "Diagnostic",
    "EdgeKind",
    "ElicitationSession",
    "Evidence",
    "EvidenceSource",
    "Hypothesis",
    "HypothesisKind",
    "InvalidMap",
    "MapEdge",
    "MapError",
    "MapNode",
    "NodeKind",
    "ParseDiagnostic",
    "ParseResult",
    "Phase",
    "Prompt",
    "RenderOptions",
    "RiskLevel",
    "Sign",
    "Status",
    "assign_layers",
    "categorize",
    "export_json",
    "generate",
    "import_json",
    "layout",
    "parse",
    "prioritize",
    "regenerate",
    "serialize",
    "structure_report",
    "summary",
    "to_dot",
    "to_svg",
]
