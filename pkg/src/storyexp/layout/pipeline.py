"""Full and incremental layout computation.

The full pipeline is discretize -> order -> align -> compact. Incremental
updates re-run the same pipeline but pin the orderings of steps far from
the edit, so untouched regions keep their arrangement.
"""

from __future__ import annotations

from .compaction import align, compact
from .discretize import discretize
from .metrics import layout_metrics
from .ordering import order_lines
from .types import LayoutParams, LayoutSpec, Session, TimeStep

# fraction of steps in the edit halo beyond which a full relayout is cheaper
FULL_RELAYOUT_FRACTION = 0.5


def _blocks(fragments, steps: list[TimeStep],
            sessions_by_step: list[list[Session]],
            y: dict[tuple[int, str], float],
            params: LayoutParams) -> list[dict]:
    by_fragment: dict[str, list[Session]] = {}
    for step_sessions in sessions_by_step:
        for session in step_sessions:
            by_fragment.setdefault(session.fragmentId, []).append(session)
    keywords = {f.id: list(f.keywords) for f in fragments}

    blocks = []
    for fragment_id in sorted(by_fragment):
        sessions = by_fragment[fragment_id]
        values = [
            y[(s.step, member)] for s in sessions for member in s.members
        ]
        blocks.append({
            "fragmentId": fragment_id,
            "x0": min(s.step for s in sessions),
            "x1": max(s.step for s in sessions),
            "y0": min(values) - params.innerGap / 2,
            "y1": max(values) + params.innerGap / 2,
            "members": sorted({m for s in sessions for m in s.members}),
            "keywords": keywords.get(fragment_id, []),
        })
    return blocks


def compute_layout(fragments, params: LayoutParams | None = None,
                   pinned: dict[int, list[str]] | None = None) -> LayoutSpec:
    params = params or LayoutParams()
    params.validate()
    steps, sessions_by_step = discretize(fragments)
    orderings = order_lines(sessions_by_step, params, pinned=pinned)
    anchors = align(orderings)
    result = compact(orderings, anchors, sessions_by_step, params)
    return LayoutSpec(
        steps=steps,
        orderings=orderings,
        y=result.y,
        sessions=sessions_by_step,
        blocks=_blocks(fragments, steps, sessions_by_step, result.y, params),
        metrics=layout_metrics(orderings, result.y),
        flags=[] if result.converged else ["nonConvergence"],
    )


def _session_signature(step_sessions: list[Session]) -> frozenset:
    return frozenset(
        (s.fragmentId, frozenset(s.members)) for s in step_sessions
    )


def incremental_update(prev: LayoutSpec, changed_ids: set[str], fragments,
                       params: LayoutParams | None = None) -> LayoutSpec:
    """Relayout after edits to the given fragments.

    Steps more than one source step away from any edit keep their previous
    ordering when their coverage is unchanged; alignment and compaction
    always run globally so gaps stay exact.
    """
    if not changed_ids:
        return prev.copy()
    params = params or LayoutParams()
    params.validate()

    touched_values: set[int] = set()
    fragment_map = {f.id: f for f in fragments}
    for fragment_id in changed_ids:
        fragment = fragment_map.get(fragment_id)
        if fragment is not None and not fragment.invalid and fragment.persons:
            touched_values.update(fragment.covered_steps())
    for step, step_sessions in zip(prev.steps, prev.sessions):
        if any(s.fragmentId in changed_ids for s in step_sessions):
            touched_values.update(step.sourceSteps)
    halo_values = {v + d for v in touched_values for d in (-1, 0, 1)}

    steps, sessions_by_step = discretize(fragments)
    halo_steps = {
        i for i, step in enumerate(steps) if step.sourceSteps & halo_values
    }
    if steps and len(halo_steps) > FULL_RELAYOUT_FRACTION * len(steps):
        spec = compute_layout(fragments, params)
        spec.flags.append("fullRelayout")
        return spec

    prev_by_source = {
        frozenset(step.sourceSteps): index
        for index, step in enumerate(prev.steps)
    }
    pinned: dict[int, list[str]] = {}
    for i, step in enumerate(steps):
        if i in halo_steps:
            continue
        prev_index = prev_by_source.get(frozenset(step.sourceSteps))
        if prev_index is None:
            continue
        if (_session_signature(sessions_by_step[i])
                == _session_signature(prev.sessions[prev_index])):
            pinned[i] = list(prev.orderings[prev_index])

    orderings = order_lines(sessions_by_step, params, pinned=pinned)
    anchors = align(orderings)
    result = compact(orderings, anchors, sessions_by_step, params)
    return LayoutSpec(
        steps=steps,
        orderings=orderings,
        y=result.y,
        sessions=sessions_by_step,
        blocks=_blocks(fragments, steps, sessions_by_step, result.y, params),
        metrics=layout_metrics(orderings, result.y),
        flags=[] if result.converged else ["nonConvergence"],
    )
