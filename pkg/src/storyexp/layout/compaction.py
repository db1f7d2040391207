"""Alignment anchors and vertical compaction.

Alignment marks, per adjacent step pair, the longest common subsequence
of the two orderings; those lines get equal-y constraints across the
pair. Compaction merges equal-y variables, then minimizes

    wiggleWeight * sum((y[s+1,l] - y[s,l])^2) + whitespaceWeight * sum(y^2)

subject to per-step ordering gaps, by cyclic projection onto the gap
half-spaces in the metric of the quadratic form (Dykstra's corrections
keep the iteration aimed at the constrained optimum rather than a mere
feasible point). The whitespace term keeps the form positive definite
and pins the otherwise translation-free optimum.

Merged variables make the equalities exact; a final pass in dependency
order rewrites each lower bound as `y_lo + gap` so the inequalities
compare exactly in floating point too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import LayoutParams, Session

SWEEP_TOLERANCE = 1e-6
MAX_SWEEPS = 10_000


def _lcs(a: list[str], b: list[str]) -> list[str]:
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                table[i][j] = table[i + 1][j + 1] + 1
            else:
                table[i][j] = max(table[i + 1][j], table[i][j + 1])
    out: list[str] = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            out.append(a[i])
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1
    return out


def align(orderings: list[list[str]]) -> list[list[str]]:
    """Aligned (straightened) lines per adjacent step pair."""
    anchors: list[list[str]] = []
    for s in range(len(orderings) - 1):
        here = set(orderings[s])
        there = set(orderings[s + 1])
        shared_a = [line for line in orderings[s] if line in there]
        shared_b = [line for line in orderings[s + 1] if line in here]
        anchors.append(_lcs(shared_a, shared_b))
    return anchors


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


@dataclass
class CompactionResult:
    y: dict[tuple[int, str], float]
    objective: float
    converged: bool
    sweeps: int


def compact(orderings: list[list[str]], anchors: list[list[str]],
            sessions_by_step: list[list[Session]], params: LayoutParams
            ) -> CompactionResult:
    instances = [(s, line) for s, ordering in enumerate(orderings) for line in ordering]
    if not instances:
        return CompactionResult(y={}, objective=0.0, converged=True, sweeps=0)
    index = {inst: i for i, inst in enumerate(instances)}

    uf = _UnionFind(len(instances))
    for s, aligned in enumerate(anchors):
        for line in aligned:
            uf.union(index[(s, line)], index[(s + 1, line)])

    roots = sorted({uf.find(i) for i in range(len(instances))})
    group_of_root = {root: g for g, root in enumerate(roots)}
    group = [group_of_root[uf.find(i)] for i in range(len(instances))]
    n = len(roots)

    alpha = params.wiggleWeight
    beta = params.whitespaceWeight
    q_form = np.zeros((n, n))
    for s in range(len(orderings) - 1):
        there = set(orderings[s + 1])
        for line in orderings[s]:
            if line not in there:
                continue
            g1 = group[index[(s, line)]]
            g2 = group[index[(s + 1, line)]]
            if g1 == g2:
                continue
            q_form[g1, g1] += alpha
            q_form[g2, g2] += alpha
            q_form[g1, g2] -= alpha
            q_form[g2, g1] -= alpha
    for i in range(len(instances)):
        q_form[group[i], group[i]] += beta

    # one gap bound per group pair; coupled steps keep the widest gap
    bounds: dict[tuple[int, int], float] = {}
    for s, ordering in enumerate(orderings):
        session_of = {
            member: session.fragmentId
            for session in sessions_by_step[s]
            for member in session.members
        }
        for k in range(len(ordering) - 1):
            lo, hi = ordering[k], ordering[k + 1]
            gap = (
                params.innerGap
                if session_of.get(lo) == session_of.get(hi)
                else params.minGap
            )
            key = (group[index[(s, lo)]], group[index[(s, hi)]])
            bounds[key] = max(bounds.get(key, 0.0), gap)
    constraints = sorted((lo, hi, gap) for (lo, hi), gap in bounds.items())

    q_inv = np.linalg.inv(q_form)
    # projection direction and curvature per constraint a = e_hi - e_lo
    directions = [q_inv[:, hi] - q_inv[:, lo] for lo, hi, _ in constraints]
    curvatures = [d[hi] - d[lo] for d, (lo, hi, _) in zip(directions, constraints)]

    y = np.zeros(n)
    corrections = [np.zeros(n) for _ in constraints]
    converged = False
    sweeps = 0
    while sweeps < MAX_SWEEPS:
        sweeps += 1
        # convergence is judged on the full sweep state: the iterate can
        # stall for a sweep while corrections still churn, so watching y
        # alone stops early on plateaus
        update = 0.0
        previous = y.copy()
        for c, (lo, hi, gap) in enumerate(constraints):
            w = y + corrections[c]
            violation = gap - (w[hi] - w[lo])
            if violation > 0.0:
                y = w + (violation / curvatures[c]) * directions[c]
            else:
                y = w
            fresh = w - y
            delta = fresh - corrections[c]
            update = max(update, float(np.max(np.abs(delta), initial=0.0)))
            corrections[c] = fresh
        update = max(
            update, float(np.max(np.abs(y - previous), initial=0.0))
        )
        if update < SWEEP_TOLERANCE:
            converged = True
            break

    # exact feasibility: rewrite each upper value in dependency order
    incoming: dict[int, list[tuple[int, float]]] = {}
    outgoing: dict[int, list[int]] = {}
    indegree = dict.fromkeys(range(n), 0)
    for lo, hi, gap in constraints:
        incoming.setdefault(hi, []).append((lo, gap))
        outgoing.setdefault(lo, []).append(hi)
        indegree[hi] += 1
    ready = sorted(g for g, d in indegree.items() if d == 0)
    order: list[int] = []
    while ready:
        g = ready.pop(0)
        order.append(g)
        for succ in sorted(outgoing.get(g, [])):
            indegree[succ] -= 1
            if indegree[succ] == 0:
                ready.append(succ)
        ready.sort()
    for g in order:
        for lo, gap in incoming.get(g, []):
            floor = y[lo] + gap
            if y[g] < floor:
                y[g] = floor

    objective = float(y @ q_form @ y)
    values = {inst: float(y[group[i]]) for inst, i in index.items()}
    return CompactionResult(
        y=values, objective=objective, converged=converged, sweeps=sweeps
    )
