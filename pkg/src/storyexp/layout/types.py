"""Layout data model and interchange serialization."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any


@dataclass
class TimeStep:
    """One dense timeline column; sourceSteps are the raw interval values."""

    index: int
    sourceSteps: set[int] = field(default_factory=set)

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "sourceSteps": sorted(self.sourceSteps)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TimeStep":
        return cls(index=int(data["index"]), sourceSteps=set(data["sourceSteps"]))


@dataclass
class Session:
    """Co-present character group of one fragment at one step."""

    step: int
    fragmentId: str
    members: list[str]

    def to_dict(self) -> dict[str, Any]:
        return {"step": self.step, "fragmentId": self.fragmentId,
                "members": list(self.members)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Session":
        return cls(step=int(data["step"]), fragmentId=str(data["fragmentId"]),
                   members=[str(m) for m in data["members"]])


@dataclass
class LayoutParams:
    minGap: float = 3.0
    innerGap: float = 1.0
    wiggleWeight: float = 1.0
    whitespaceWeight: float = 0.1
    orderingSweeps: int = 8

    def validate(self) -> None:
        if self.minGap <= 0 or self.innerGap <= 0:
            raise ValueError("gaps must be positive")
        if self.wiggleWeight < 0 or self.whitespaceWeight < 0:
            raise ValueError("weights must be non-negative")
        if self.orderingSweeps < 1:
            raise ValueError("orderingSweeps must be positive")

    @classmethod
    def from_overrides(cls, overrides: dict[str, str]) -> "LayoutParams":
        params = cls()
        for key, raw in overrides.items():
            if not hasattr(params, key):
                raise ValueError(f"unknown layout parameter {key!r}")
            current = getattr(params, key)
            setattr(params, key, type(current)(raw))
        params.validate()
        return params


def _round6(value: float) -> float:
    return round(float(value), 6)


@dataclass
class LayoutSpec:
    steps: list[TimeStep]
    orderings: list[list[str]]
    y: dict[tuple[int, str], float]
    sessions: list[list[Session]]
    blocks: list[dict[str, Any]]
    metrics: dict[str, Any]
    flags: list[str] = field(default_factory=list)

    def line_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for ordering in self.orderings:
            for line in ordering:
                seen.setdefault(line)
        return sorted(seen)

    def copy(self) -> "LayoutSpec":
        return copy.deepcopy(self)

    def to_dict(self) -> dict[str, Any]:
        lines = []
        for line in self.line_ids():
            segments = [
                {"step": s, "y": _round6(self.y[(s, line)])}
                for s in range(len(self.steps))
                if (s, line) in self.y
            ]
            lines.append({"entityId": line, "segments": segments})
        return {
            "steps": [s.to_dict() for s in self.steps],
            "lines": lines,
            "blocks": [
                {**b, "x0": b["x0"], "x1": b["x1"],
                 "y0": _round6(b["y0"]), "y1": _round6(b["y1"])}
                for b in self.blocks
            ],
            "metrics": {
                "crossings": self.metrics["crossings"],
                "wiggles": self.metrics["wiggles"],
                "whitespace": _round6(self.metrics["whitespace"]),
            },
            "flags": list(self.flags),
            "sessions": [[s.to_dict() for s in group] for group in self.sessions],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LayoutSpec":
        steps = [TimeStep.from_dict(s) for s in data["steps"]]
        y: dict[tuple[int, str], float] = {}
        for line in data["lines"]:
            for seg in line["segments"]:
                y[(int(seg["step"]), str(line["entityId"]))] = float(seg["y"])
        orderings: list[list[str]] = []
        for s in range(len(steps)):
            active = [(yv, line) for (step, line), yv in y.items() if step == s]
            orderings.append([line for _, line in sorted(active)])
        sessions = [
            [Session.from_dict(s) for s in group]
            for group in data.get("sessions", [])
        ]
        return cls(
            steps=steps,
            orderings=orderings,
            y=y,
            sessions=sessions,
            blocks=[dict(b) for b in data["blocks"]],
            metrics=dict(data["metrics"]),
            flags=[str(f) for f in data.get("flags", [])],
        )
