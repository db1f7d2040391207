"""Ink understanding: gesture recognition and text binding."""

from .binding import (
    LineBox,
    PendingSpans,
    bind_to_spans,
    classify_position,
    merge_multiline,
    monospace_layout,
    stroke_bbox,
)
from .recognizer import (
    RESAMPLE_N,
    GestureTemplate,
    RecognitionResult,
    TemplateRegistry,
    built_in_templates,
    make_template,
    normalize,
    recognize,
)

__all__ = [
    "GestureTemplate",
    "LineBox",
    "PendingSpans",
    "RESAMPLE_N",
    "RecognitionResult",
    "TemplateRegistry",
    "bind_to_spans",
    "built_in_templates",
    "classify_position",
    "make_template",
    "merge_multiline",
    "monospace_layout",
    "normalize",
    "recognize",
    "stroke_bbox",
]
