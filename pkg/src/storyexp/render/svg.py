"""Thin SVG element helpers over the stdlib XML tree."""

from __future__ import annotations

from xml.etree import ElementTree as ET

SVG_NS = "http://www.w3.org/2000/svg"


def fmt(value: float) -> str:
    """Fixed two-decimal coordinate formatting keeps output diffable."""
    return f"{float(value):.2f}"


def element(tag: str, parent: ET.Element | None = None,
            text: str | None = None, **attrs: str) -> ET.Element:
    node = ET.Element(tag) if parent is None else ET.SubElement(parent, tag)
    for key, value in attrs.items():
        node.set(key.replace("_", "-"), value)
    if text is not None:
        node.text = text
    return node


def svg_root(width: float, height: float) -> ET.Element:
    return element(
        "svg",
        xmlns=SVG_NS,
        width=fmt(width),
        height=fmt(height),
        viewBox=f"0 0 {fmt(width)} {fmt(height)}",
    )


def to_string(root: ET.Element) -> str:
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"
