"""Parsing and serialization: text DSL, canonical JSON, DOT export."""

from .dot import to_dot
from .dsl import SourceSpan, parse_model, parse_pattern, to_dsl
from .jsonio import from_json, to_json

__all__ = [
    "SourceSpan",
    "from_json",
    "parse_model",
    "parse_pattern",
    "to_dot",
    "to_dsl",
    "to_json",
]
