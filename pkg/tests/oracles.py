"""Independent reference implementations used to check the fast paths.

Everything here deliberately avoids the production algorithms: crossings are
counted by quadratic pair scans, the ordering optimum comes from exhaustive
dynamic programming, the compaction optimum from a dense constrained QP
solve (scipy), and the recognizer score from a brute-force 1-degree rotation
scan. Shared vocabulary types (Session, LayoutParams) are imported because
they are plain data carriers, not logic.
"""

from __future__ import annotations

import math
import random
from itertools import permutations, product

import numpy as np

from storyexp.layout.types import LayoutParams, Session

# -- instance generators --------------------------------------------------


def random_layout_instance(rng: random.Random, max_lines: int, max_steps: int
                           ) -> list[list[Session]]:
    """Random sessions-by-step table with 80% line activity per step."""
    n_lines = rng.randint(2, max_lines)
    n_steps = rng.randint(2, max_steps)
    lines = [f"L{i}" for i in range(n_lines)]
    sessions_by_step: list[list[Session]] = []
    fid = 0
    for s in range(n_steps):
        active = [line for line in lines if rng.random() < 0.8]
        if not active:
            active = [rng.choice(lines)]
        rng.shuffle(active)
        groups = []
        i = 0
        while i < len(active):
            size = rng.randint(1, len(active) - i)
            groups.append(active[i:i + size])
            i += size
        step_sessions = []
        for members in groups:
            fid += 1
            step_sessions.append(
                Session(step=s, fragmentId=f"f{fid:03d}", members=list(members))
            )
        sessions_by_step.append(step_sessions)
    return sessions_by_step


# -- ordering: exhaustive optimum ------------------------------------------


def reference_crossings(a: list[str], b: list[str]) -> int:
    """Quadratic pair scan over lines shared by two adjacent orderings."""
    pos_b = {line: i for i, line in enumerate(b)}
    shared = [line for line in a if line in pos_b]
    count = 0
    for i in range(len(shared)):
        for j in range(i + 1, len(shared)):
            if pos_b[shared[i]] > pos_b[shared[j]]:
                count += 1
    return count


def reference_total_crossings(orderings: list[list[str]]) -> int:
    return sum(
        reference_crossings(orderings[s], orderings[s + 1])
        for s in range(len(orderings) - 1)
    )


def _arrangements(step_sessions: list[Session]) -> list[tuple[str, ...]]:
    """Every session-contiguous line arrangement for one step."""
    member_lists = [tuple(s.members) for s in step_sessions]
    out = []
    for order in permutations(range(len(member_lists))):
        pools = [list(permutations(member_lists[i])) for i in order]
        for arrangement in product(*pools):
            out.append(tuple(m for block in arrangement for m in block))
    return sorted(set(out))


def exhaustive_min_crossings(sessions_by_step: list[list[Session]]) -> int:
    """Exact optimum: DP over per-step session-contiguous arrangements."""
    layers = [_arrangements(ss) for ss in sessions_by_step]
    best = {arr: 0 for arr in layers[0]}
    for s in range(1, len(layers)):
        best = {
            arr: min(
                best[prev] + reference_crossings(list(prev), list(arr))
                for prev in layers[s - 1]
            )
            for arr in layers[s]
        }
    return min(best.values())


# -- compaction: dense constrained QP ---------------------------------------


def reference_qp_objective(orderings: list[list[str]],
                           anchors: list[list[str]],
                           sessions_by_step: list[list[Session]],
                           params: LayoutParams) -> float:
    """Optimal objective from a dense equality/active-set solve (SLSQP).

    Works in instance space, one variable per (step, line) slot, so it shares
    no structure with the grouped projection solver it is checking.
    """
    from scipy.optimize import minimize

    instances = [(s, line) for s, o in enumerate(orderings) for line in o]
    idx = {inst: i for i, inst in enumerate(instances)}
    n = len(instances)
    alpha, beta = params.wiggleWeight, params.whitespaceWeight

    def objective(y: np.ndarray) -> float:
        wiggle = 0.0
        for s in range(len(orderings) - 1):
            there = set(orderings[s + 1])
            for line in orderings[s]:
                if line in there:
                    wiggle += alpha * (y[idx[(s + 1, line)]] - y[idx[(s, line)]]) ** 2
        return wiggle + beta * float(y @ y)

    cons = []
    for s, aligned in enumerate(anchors):
        for line in aligned:
            i, j = idx[(s, line)], idx[(s + 1, line)]
            cons.append({"type": "eq", "fun": (lambda y, i=i, j=j: y[j] - y[i])})
    for s, ordering in enumerate(orderings):
        session_of = {
            m: ss.fragmentId for ss in sessions_by_step[s] for m in ss.members
        }
        for k in range(len(ordering) - 1):
            lo, hi = ordering[k], ordering[k + 1]
            gap = (params.innerGap
                   if session_of.get(lo) == session_of.get(hi)
                   else params.minGap)
            i, j = idx[(s, lo)], idx[(s, hi)]
            cons.append({
                "type": "ineq",
                "fun": (lambda y, i=i, j=j, g=gap: y[j] - y[i] - g),
            })
    res = minimize(objective, np.zeros(n), method="SLSQP", constraints=cons,
                   options={"maxiter": 600, "ftol": 1e-12})
    return float(res.fun)


def reference_gap_violations(y: dict[tuple[int, str], float],
                             orderings: list[list[str]],
                             sessions_by_step: list[list[Session]],
                             params: LayoutParams) -> int:
    """Count of adjacent slots closer than their required gap."""
    violations = 0
    for s, ordering in enumerate(orderings):
        session_of = {
            m: ss.fragmentId for ss in sessions_by_step[s] for m in ss.members
        }
        for k in range(len(ordering) - 1):
            lo, hi = ordering[k], ordering[k + 1]
            gap = (params.innerGap
                   if session_of.get(lo) == session_of.get(hi)
                   else params.minGap)
            if y[(s, hi)] - y[(s, lo)] < gap - 1e-12:
                violations += 1
    return violations


# -- layout metrics: naive scanners -----------------------------------------


def reference_wiggles(orderings: list[list[str]],
                      y: dict[tuple[int, str], float]) -> int:
    count = 0
    for s in range(len(orderings) - 1):
        there = set(orderings[s + 1])
        for line in orderings[s]:
            if line in there and abs(y[(s + 1, line)] - y[(s, line)]) > 1e-9:
                count += 1
    return count


def reference_whitespace(orderings: list[list[str]],
                         y: dict[tuple[int, str], float]) -> float:
    values = [y[(s, line)] for s, o in enumerate(orderings) for line in o]
    if not values:
        return 0.0
    return sum(v * v for v in values) / len(values)


# -- recognizer: brute-force rotation scan -----------------------------------

ORACLE_RESAMPLE = 96
ORACLE_BOX = 250.0
ORACLE_ONE_D_RATIO = 0.30
ORACLE_HALF_DIAGONAL = 0.5 * math.sqrt(2.0) * ORACLE_BOX


def _oracle_resample(pts: np.ndarray, n: int) -> np.ndarray:
    deltas = np.diff(pts, axis=0)
    seg = np.hypot(deltas[:, 0], deltas[:, 1])
    total = float(seg.sum())
    if total <= 0.0:
        raise ValueError("degenerate ink")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, total, n)
    xs = np.interp(targets, cum, pts[:, 0])
    ys = np.interp(targets, cum, pts[:, 1])
    return np.column_stack([xs, ys])


def _oracle_normalize(strokes) -> np.ndarray:
    pts = np.vstack([np.asarray(s, dtype=float)[:, :2] for s in strokes])
    pts = _oracle_resample(pts, ORACLE_RESAMPLE)
    centroid = pts.mean(axis=0)
    angle = math.atan2(pts[0, 1] - centroid[1], pts[0, 0] - centroid[0])
    c, s = math.cos(-angle), math.sin(-angle)
    rot = np.array([[c, -s], [s, c]])
    pts = (pts - centroid) @ rot.T + centroid
    width = float(np.ptp(pts[:, 0]))
    height = float(np.ptp(pts[:, 1]))
    longer = max(width, height)
    shorter = min(width, height)
    if longer <= 0.0:
        raise ValueError("degenerate ink")
    if shorter / longer < ORACLE_ONE_D_RATIO:
        pts = pts * (ORACLE_BOX / longer)
    else:
        pts = np.column_stack([
            pts[:, 0] * (ORACLE_BOX / width),
            pts[:, 1] * (ORACLE_BOX / height),
        ])
    return pts - pts.mean(axis=0)


def reference_recognize(strokes, templates) -> tuple[str, float]:
    """Best template by scanning rotation in whole-degree steps.

    `templates` is a list of (name, strokes) pairs of raw ink; multistroke
    order/direction variants are enumerated here too so the scan stays
    independent of the production precomputation.
    """
    candidate = _oracle_normalize(strokes)
    best_name, best_dist = templates[0][0], math.inf
    for name, raw_strokes in templates:
        raws = [np.asarray(s, dtype=float) for s in raw_strokes]
        orders = permutations(range(len(raws))) if len(raws) <= 3 else [tuple(range(len(raws)))]
        for order in orders:
            for flips in product((False, True), repeat=len(raws)):
                arranged = [
                    raws[i][::-1] if flips[j] else raws[i]
                    for j, i in enumerate(order)
                ]
                tpl = _oracle_normalize(arranged)
                for degrees in range(-45, 46):
                    theta = math.radians(degrees)
                    c, s = math.cos(theta), math.sin(theta)
                    rot = np.array([[c, -s], [s, c]])
                    dist = float(np.mean(
                        np.linalg.norm(candidate @ rot.T - tpl, axis=1)
                    ))
                    if dist < best_dist:
                        best_dist = dist
                        best_name = name
    return best_name, 1.0 - best_dist / ORACLE_HALF_DIAGONAL
