"""Scene configuration: scales, palettes, fonts, viewport."""

from __future__ import annotations

from dataclasses import dataclass, field

# persons read warm, starting at red
PERSON_PALETTE = [
    "#e03131", "#1971c2", "#f08c00", "#9c36b5",
    "#0ca678", "#e8590c", "#3b5bdb", "#c2255c",
]
# places read cool, starting at green
PLACE_PALETTE = [
    "#2f9e44", "#66a80f", "#099268", "#1098ad",
    "#74b816", "#37b24d", "#0c8599", "#2b8a3e",
]


@dataclass
class FontMetrics:
    minSize: float = 10.0
    maxSize: float = 28.0
    labelSize: float = 12.0
    # mean glyph advance as a fraction of the font size
    widthRatio: float = 0.6

    def validate(self) -> None:
        if self.minSize <= 0 or self.maxSize < self.minSize:
            raise ValueError("font sizes must satisfy 0 < min <= max")
        if self.labelSize <= 0 or self.widthRatio <= 0:
            raise ValueError("font metrics must be positive")


@dataclass
class SceneConfig:
    pxPerStep: float = 120.0
    pxPerUnit: float = 14.0
    palette: list[str] = field(default_factory=lambda: list(PERSON_PALETTE))
    placePalette: list[str] = field(default_factory=lambda: list(PLACE_PALETTE))
    font: FontMetrics = field(default_factory=FontMetrics)
    viewportWidth: float = 1600.0
    viewportHeight: float = 900.0

    def validate(self) -> None:
        if self.pxPerStep <= 0 or self.pxPerUnit <= 0:
            raise ValueError("scales must be positive")
        if len(self.palette) < 8 or len(self.placePalette) < 8:
            raise ValueError("palettes need at least 8 colors")
        if self.viewportWidth <= 0 or self.viewportHeight <= 0:
            raise ValueError("viewport must be positive")
        self.font.validate()

    def person_color(self, color_key: int) -> str:
        return self.palette[color_key % len(self.palette)]

    def place_color(self, color_key: int) -> str:
        return self.placePalette[color_key % len(self.placePalette)]
