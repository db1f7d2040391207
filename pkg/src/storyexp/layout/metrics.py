"""Storyline quality measures."""

from __future__ import annotations

from .ordering import crossings_between

WIGGLE_EPSILON = 1e-9


def layout_metrics(orderings: list[list[str]],
                   y: dict[tuple[int, str], float]) -> dict:
    crossings = sum(
        crossings_between(orderings[s], orderings[s + 1])
        for s in range(len(orderings) - 1)
    )
    wiggles = 0
    for s in range(len(orderings) - 1):
        there = set(orderings[s + 1])
        for line in orderings[s]:
            if line in there and abs(y[(s + 1, line)] - y[(s, line)]) > WIGGLE_EPSILON:
                wiggles += 1
    instances = sum(len(o) for o in orderings)
    whitespace = (
        sum(v * v for v in y.values()) / instances if instances else 0.0
    )
    return {"crossings": crossings, "wiggles": wiggles, "whitespace": whitespace}
