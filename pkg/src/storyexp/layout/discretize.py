"""Timeline discretization: fragment intervals to dense steps and sessions."""

from __future__ import annotations

from ..errors import OverlapConflict
from .types import Session, TimeStep


def discretize(fragments) -> tuple[list[TimeStep], list[list[Session]]]:
    """Compress interval values to dense indices; one session per fragment
    per covered step.

    A character claimed by two fragments at one step is a conflict the
    user must resolve by dragging; it is never auto-split.
    """
    active = [f for f in fragments if not f.invalid and f.persons]
    values = sorted({v for f in active for v in f.covered_steps()})
    index_of = {v: i for i, v in enumerate(values)}
    steps = [TimeStep(index=i, sourceSteps={v}) for i, v in enumerate(values)]
    sessions: list[list[Session]] = [[] for _ in steps]
    conflicts: list[tuple[str, int, str, str]] = []

    for value in values:
        occupants: dict[str, str] = {}
        for fragment in active:
            if not (fragment.interval[0] <= value <= fragment.interval[1]):
                continue
            for person in fragment.persons:
                if person in occupants:
                    conflicts.append((person, value, occupants[person], fragment.id))
                else:
                    occupants[person] = fragment.id
            sessions[index_of[value]].append(
                Session(step=index_of[value], fragmentId=fragment.id,
                        members=list(fragment.persons))
            )

    if conflicts:
        raise OverlapConflict(conflicts)
    return steps, sessions
