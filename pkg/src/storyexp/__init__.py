"""Storyline authoring engine.

Turns annotated narrative text into an editable character-line storyline:
ink gestures select text, extraction providers propose typed entities,
fragments group entities over a timeline, and the layout engine orders,
aligns and compacts character lines into an SVG scene.
"""

__version__ = "0.1.0"
