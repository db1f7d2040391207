"""Per-step line ordering that keeps sessions contiguous.

Heuristic: barycenter sweeps against the neighbor steps, then per-step
exhaustive coordinate descent over all session-contiguous arrangements
(small steps only). The narrative-order baseline is always a candidate,
so the result is never worse than it.
"""

from __future__ import annotations

import copy
from itertools import permutations, product
from math import factorial

from .types import LayoutParams, Session

# per-step arrangement count above which exhaustive descent is skipped
ORDER_ENUM_CAP = 5040
# coordinate-descent rounds per sweep; small instances settle in a few
MAX_DESCENT_ROUNDS = 40


def crossings_between(a: list[str], b: list[str]) -> int:
    pos_b = {line: i for i, line in enumerate(b)}
    shared = [line for line in a if line in pos_b]
    count = 0
    for i in range(len(shared)):
        for j in range(i + 1, len(shared)):
            if pos_b[shared[i]] > pos_b[shared[j]]:
                count += 1
    return count


def total_crossings(orderings: list[list[str]]) -> int:
    return sum(
        crossings_between(orderings[s], orderings[s + 1])
        for s in range(len(orderings) - 1)
    )


def baseline_orderings(sessions_by_step: list[list[Session]]) -> list[list[str]]:
    """Narrative order: sessions as created, members as listed."""
    return [
        [m for session in step_sessions for m in session.members]
        for step_sessions in sessions_by_step
    ]


def _enumerate_step(step_sessions: list[Session]) -> list[list[str]] | None:
    count = factorial(len(step_sessions))
    for session in step_sessions:
        count *= factorial(len(session.members))
        if count > ORDER_ENUM_CAP:
            return None
    out: list[list[str]] = []
    member_lists = [tuple(s.members) for s in step_sessions]
    for order in permutations(range(len(member_lists))):
        pools = [permutations(member_lists[i]) for i in order]
        for arrangement in product(*pools):
            out.append([m for block in arrangement for m in block])
    return out


def _session_blocks(ordering: list[str], step_sessions: list[Session]
                    ) -> list[tuple[Session, list[str]]]:
    position = {line: i for i, line in enumerate(ordering)}
    blocks = [
        (session, sorted(session.members, key=lambda m: position[m]))
        for session in step_sessions
    ]
    blocks.sort(key=lambda blk: min(position[m] for m in blk[1]))
    return blocks


def _barycenter(ordering: list[str], step_sessions: list[Session],
                reference: list[str]) -> list[str]:
    """Reorder one step by mean neighbor position, sessions kept whole."""
    ref_pos = {line: i for i, line in enumerate(reference)}
    blocks = _session_blocks(ordering, step_sessions)

    def member_key(member: str, current: int) -> tuple[float, str]:
        return (float(ref_pos.get(member, current)), member)

    keyed = []
    for rank, (session, members) in enumerate(blocks):
        members = [
            m for _, m in sorted(
                (member_key(m, i), m) for i, m in enumerate(members)
            )
        ]
        anchored = [ref_pos[m] for m in members if m in ref_pos]
        key = (sum(anchored) / len(anchored), 0.0) if anchored else (float(rank), 1.0)
        keyed.append((key, session.fragmentId, members))
    keyed.sort(key=lambda item: (item[0], item[1]))
    return [m for _, _, members in keyed for m in members]


def order_lines(sessions_by_step: list[list[Session]], params: LayoutParams,
                pinned: dict[int, list[str]] | None = None) -> list[list[str]]:
    pinned = pinned or {}
    steps = len(sessions_by_step)
    baseline = baseline_orderings(sessions_by_step)
    for index, ordering in pinned.items():
        baseline[index] = list(ordering)
    if steps <= 1:
        return baseline

    enums = [
        None if s in pinned else _enumerate_step(sessions_by_step[s])
        for s in range(steps)
    ]

    def local_cost(orderings: list[list[str]], s: int, candidate: list[str]) -> int:
        cost = 0
        if s > 0:
            cost += crossings_between(orderings[s - 1], candidate)
        if s + 1 < steps:
            cost += crossings_between(candidate, orderings[s + 1])
        return cost

    best = [list(o) for o in baseline]
    best_cost = total_crossings(best)

    def consider(orderings: list[list[str]]) -> None:
        nonlocal best, best_cost
        cost = total_crossings(orderings)
        if cost < best_cost:
            best = [list(o) for o in orderings]
            best_cost = cost

    def refine(start: list[list[str]]) -> None:
        current = copy.deepcopy(start)
        for _ in range(params.orderingSweeps):
            for s in range(1, steps):
                if s not in pinned:
                    current[s] = _barycenter(
                        current[s], sessions_by_step[s], current[s - 1])
            for s in range(steps - 2, -1, -1):
                if s not in pinned:
                    current[s] = _barycenter(
                        current[s], sessions_by_step[s], current[s + 1])
            consider(current)
            for _ in range(MAX_DESCENT_ROUNDS):
                improved = False
                for s in range(steps):
                    if enums[s] is None:
                        continue
                    incumbent = local_cost(current, s, current[s])
                    chosen = current[s]
                    for candidate in enums[s]:
                        cost = local_cost(current, s, candidate)
                        if cost < incumbent:
                            incumbent = cost
                            chosen = candidate
                            improved = True
                    current[s] = list(chosen)
                if not improved:
                    break
            consider(current)
            if best_cost == 0:
                return

    # second deterministic start: sessions and members in id order
    alternate = [list(o) for o in baseline]
    for s, step_sessions in enumerate(sessions_by_step):
        if s in pinned:
            continue
        alternate[s] = [
            m
            for _, members in sorted(
                (min(session.members), sorted(session.members))
                for session in step_sessions
            )
            for m in members
        ]

    refine(baseline)
    if best_cost > 0:
        refine(alternate)
    return best
