"""SVG rendering of storyline layouts and fragment diagrams."""

from .config import FontMetrics, SceneConfig
from .scene import (
    render_fragment_diagram,
    render_location_bands,
    render_minimap,
    render_storyline,
    render_time_points,
)
from .wordcloud import (
    Region,
    WordCloudPlacement,
    WordCloudResult,
    layout_wordcloud,
    placement_box,
)

__all__ = [
    "FontMetrics",
    "Region",
    "SceneConfig",
    "WordCloudPlacement",
    "WordCloudResult",
    "layout_wordcloud",
    "placement_box",
    "render_fragment_diagram",
    "render_location_bands",
    "render_minimap",
    "render_storyline",
    "render_time_points",
]
