"""Built-in exact solver: branch-and-bound over arc-flow batch patterns.

The search opens batches structure by structure, highest distinct processing
time first.  A batch is a pattern: counts per size class, total size within
capacity, at least one job of the structure's own time class (a batch without
one would be cheaper in a lower structure).  Equal patterns are committed as
one run (pattern, multiplicity), and runs within a structure are forced into
strictly decreasing pattern order, so relabeling symmetry never appears.
Jobs are drawn from the highest eligible time class first inside each size
class, which is exchange-safe.  Only patterns maximal under the current
availability are branched on: padding a batch never raises its cost and only
shrinks the remaining multiset.

Pruning uses the staircase area bound (``lower_bound``) sharpened with
per-size count ceilings; both are admissible.  Optimality is proven by
raising the certified bound one unit per depth-first pass while memoizing
completion lower bounds per search state, so permuted pattern orders and
repeated passes share their work.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import inf
from typing import Iterator, Optional, Sequence

from .graph import FEEDBACK, JOB, LOSS, Arc, ArcFlowGraph, bounds as arc_bounds
from .graph import build_graph, reduce_graph
from .instance import ClassProfile, Instance, profile, require_valid

STATUS_OPTIMAL = "Optimal"
STATUS_FEASIBLE = "Feasible"
STATUS_INFEASIBLE = "Infeasible"
STATUS_TIMELIMIT = "TimeLimit"
STATUS_ERROR = "Error"

# flows[t][arc] = integer units on that arc in structure t (0-based)
Flows = dict[int, dict[Arc, int]]


@dataclass(frozen=True)
class BatchPattern:
    """One batch shape in a structure: counts per size class (ascending sizes)."""

    structure: int
    counts: tuple[int, ...]


@dataclass
class SolveReport:
    status: str
    objective: Optional[float]
    bound: Optional[float]
    gap: Optional[float]
    nodes: Optional[int]
    wall_time_s: float
    feedback_flows: Optional[tuple[int, ...]] = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "objective": self.objective,
            "bound": self.bound,
            "gap": self.gap,
            "nodes": self.nodes,
            "wall_time_s": round(self.wall_time_s, 6),
            "feedback_flows": (
                list(self.feedback_flows) if self.feedback_flows is not None else None
            ),
        }


def compute_gap(objective, bound) -> Optional[float]:
    """Relative duality gap; inf without an incumbent, None without a bound."""
    if objective is None:
        return inf
    if bound is None:
        return None
    if objective == 0:
        return 0.0
    return max(0.0, (objective - bound) / objective)


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def lower_bound(remaining: Sequence[Sequence[int]], prof: ClassProfile, capacity: int) -> int:
    """Staircase bound: ceilings of cumulative remaining area over descending
    time classes, made nondecreasing, priced by Abel summation.  Admissible."""
    sizes, times = prof.sizes, prof.times
    bound = 0
    prev = 0
    cum_area = 0
    for t in range(len(times) - 1, -1, -1):
        cum_area += sum(remaining[l][t] * sizes[l] for l in range(len(sizes)))
        m = -(-cum_area // capacity)
        if m < prev:
            m = prev
        bound += (m - prev) * times[t]
        prev = m
    return bound


def _sharp_bound(rem, sizes, times, caps, capacity) -> int:
    # staircase plus per-size count ceilings (each batch holds at most
    # floor(B/S_l) jobs of size S_l); still admissible
    theta = len(sizes)
    bound = 0
    prev = 0
    cum_area = 0
    cum_cnt = [0] * theta
    for t in range(len(times) - 1, -1, -1):
        for l in range(theta):
            c = rem[l][t]
            if c:
                cum_cnt[l] += c
                cum_area += c * sizes[l]
        m = -(-cum_area // capacity)
        for l in range(theta):
            if cum_cnt[l]:
                g = -(-cum_cnt[l] // caps[l])
                if g > m:
                    m = g
        if m < prev:
            m = prev
        bound += (m - prev) * times[t]
        prev = m
    return bound


# ---------------------------------------------------------------------------
# Pattern enumeration
# ---------------------------------------------------------------------------

def _patterns_desc(sizes, cap, avail) -> Iterator[tuple[int, ...]]:
    # all count vectors with total size <= cap and counts <= avail, in
    # nonincreasing lexicographic order over descending size classes
    theta = len(sizes)
    counts = [0] * theta

    def rec(l, cap_left):
        if l < 0:
            yield tuple(counts)
            return
        top = min(avail[l], cap_left // sizes[l])
        for c in range(top, -1, -1):
            counts[l] = c
            yield from rec(l - 1, cap_left - c * sizes[l])
        counts[l] = 0

    yield from rec(theta - 1, cap)


def enumerate_patterns(
    structure: int, remaining: Sequence[Sequence[int]], graph: ArcFlowGraph
) -> Iterator[BatchPattern]:
    """All feasible batch patterns for one structure, largest first.

    ``remaining[l][t]`` counts leftover jobs per (size class, time class),
    size classes ascending.  Every yielded pattern is nonempty and can take
    at least one job whose time class is exactly ``structure``; each appears
    once, in nonincreasing lexicographic order over descending size classes.
    """
    sizes = sorted({a.head - a.tail for a in graph.arcs if a.kind == JOB})
    theta = len(sizes)
    avail = [sum(remaining[l][: structure + 1]) for l in range(theta)]
    in_class = [remaining[l][structure] for l in range(theta)]
    for q in _patterns_desc(sizes, graph.capacity, avail):
        if not any(q):
            continue
        if any(q[l] and in_class[l] for l in range(theta)):
            yield BatchPattern(structure=structure, counts=q)


def _desc_key(q):
    return tuple(reversed(q))


# ---------------------------------------------------------------------------
# Structure covers (initial incumbent)
# ---------------------------------------------------------------------------

def _greedy_cover(r, sizes, capacity):
    # collapsed first-fit decreasing over counts; returns [(counts, mult)]
    theta = len(sizes)
    res = list(r)
    out = []
    while True:
        cap = capacity
        counts = [0] * theta
        for l in range(theta - 1, -1, -1):
            if res[l] and cap >= sizes[l]:
                take = min(res[l], cap // sizes[l])
                counts[l] = take
                cap -= take * sizes[l]
        if not any(counts):
            return out
        mult = min(res[l] // counts[l] for l in range(theta) if counts[l])
        for l in range(theta):
            res[l] -= counts[l] * mult
        out.append((tuple(counts), mult))


def _count_lb(r, sizes, caps, capacity) -> int:
    area = sum(r[l] * sizes[l] for l in range(len(sizes)))
    lb = -(-area // capacity)
    for l in range(len(sizes)):
        if r[l]:
            g = -(-r[l] // caps[l])
            if g > lb:
                lb = g
    return lb


def _gauss_solve(rows, rhs):
    # exact Gaussian elimination over Fractions; None when singular
    from fractions import Fraction

    n = len(rows)
    a = [[Fraction(rows[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if a[i][col]), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col]
        a[col] = [x / inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [a[i][n] for i in range(n)]


def _lp_cover(r, sizes, capacity):
    """Cover guide for huge counts: best basic solution of the pattern-count
    LP (exact rational arithmetic), floored to integers.  Returns
    (runs, residual) or None when no usable basis exists."""
    from itertools import combinations

    theta = len(sizes)
    live = [l for l in range(theta) if r[l]]
    if not live or len(live) > 6:
        return None
    pats = []
    for q in _patterns_desc(sizes, capacity, r):
        if not any(q):
            continue
        area = sum(q[l] * sizes[l] for l in range(theta))
        if all(area + sizes[l] > capacity or r[l] <= q[l] for l in range(theta)):
            pats.append(q)
    k = len(live)
    from math import comb

    if comb(len(pats), k) > 20_000:
        return None
    best_obj = None
    best_x = None
    best_basis = None
    for basis in combinations(pats, k):
        rows = [[q[l] for q in basis] for l in live]
        x = _gauss_solve(rows, [r[l] for l in live])
        if x is None or any(v < 0 for v in x):
            continue
        obj = sum(x)
        if best_obj is None or obj < best_obj:
            best_obj, best_x, best_basis = obj, x, basis
    if best_basis is None:
        return None
    runs = []
    residual = list(r)
    for q, v in zip(best_basis, best_x):
        m = int(v)  # floor; v >= 0
        if m:
            runs.append((q, m))
            for l in range(theta):
                residual[l] -= q[l] * m
    if any(v < 0 for v in residual):
        return None
    return runs, residual


def _min_cover(r, sizes, capacity, budget=150_000, max_patterns=2000):
    """Pack counts ``r`` into as few batches as possible (exact for small
    counts; LP-guided plus an exact residual for huge multiplicities; the
    greedy cover as the fallback)."""
    theta = len(sizes)
    caps = [capacity // s for s in sizes]
    greedy = _greedy_cover(r, sizes, capacity)
    best_count = sum(m for _, m in greedy)
    lb = _count_lb(r, sizes, caps, capacity)
    if best_count <= lb:
        return greedy

    if sum(r) > 64 * len(sizes):
        guided = _lp_cover(r, sizes, capacity)
        if guided is not None:
            runs, residual = guided
            tail = _min_cover(residual, sizes, capacity, budget) if any(residual) else []
            merged: dict[tuple, int] = {}
            for q, m in runs + list(tail):
                merged[q] = merged.get(q, 0) + m
            if sum(merged.values()) < best_count:
                return sorted(merged.items(), key=lambda qm: _desc_key(qm[0]), reverse=True)
        return greedy

    patterns = []
    for q in _patterns_desc(sizes, capacity, r):
        if any(q):
            patterns.append(q)
        if len(patterns) > max_patterns:
            return greedy
    patterns.sort(
        key=lambda q: (-sum(q[l] * sizes[l] for l in range(theta)), _desc_key(q))
    )

    best = [best_count, greedy]
    res = list(r)
    chosen: list = []
    steps = [0]

    def rec(idx, used):
        steps[0] += 1
        if steps[0] > budget:
            return
        area_left = sum(res[l] * sizes[l] for l in range(theta))
        if area_left == 0:
            if used < best[0]:
                best[0] = used
                best[1] = list(chosen)
            return
        need = _count_lb(res, sizes, caps, capacity)
        if used + need >= best[0] or idx >= len(patterns):
            return
        q = patterns[idx]
        mfit = min((res[l] // q[l] for l in range(theta) if q[l]), default=0)
        mfit = min(mfit, best[0] - 1 - used)
        for m in range(mfit, -1, -1):
            if steps[0] > budget:
                return
            if m:
                for l in range(theta):
                    res[l] -= q[l] * m
                chosen.append((q, m))
                rec(idx + 1, used + m)
                chosen.pop()
                for l in range(theta):
                    res[l] += q[l] * m
            else:
                rec(idx + 1, used)

    rec(0, 0)
    return best[1]


def _subvectors_by_area(u, sizes, cap):
    # one representative subvector of u per achievable area up to cap
    theta = len(sizes)
    best: list = [None] * (cap + 1)
    best[0] = tuple([0] * theta)
    for l in range(theta):
        s = sizes[l]
        if not u[l] or s > cap:
            continue
        for a in range(s, cap + 1):
            prev = best[a - s]
            if prev is not None and prev[l] < u[l] and best[a] is None:
                grown = list(prev)
                grown[l] += 1
                best[a] = tuple(grown)
    return best


def _repair_stranded_slack(cover, t, rem, sizes, capacity):
    """Re-split batch pairs so slack concentrates on batches the lower-class
    pool can actually fill (a 1-unit hole is dead space when every size is
    bigger).  Keeps the batch count; returns a new run list."""
    theta = len(sizes)
    avail = [sum(rem[l][tt] for tt in range(t)) for l in range(theta)]

    def fillable(slack):
        if slack == 0:
            return True
        got = _fill_dp(slack, sizes, avail)
        return got is not None and sum(got[l] * sizes[l] for l in range(theta)) == slack

    runs = [[q, m] for q, m in cover]
    changed = True
    while changed:
        changed = False
        slacks = [
            capacity - sum(q[l] * sizes[l] for l in range(theta)) for q, _ in runs
        ]
        bad = next((i for i, s in enumerate(slacks) if s and not fillable(s)), None)
        if bad is None:
            break
        for j, (q2, m2) in enumerate(runs):
            if j == bad or slacks[j] == 0:
                continue
            union = tuple(runs[bad][0][l] + q2[l] for l in range(theta))
            union_area = 2 * capacity - slacks[bad] - slacks[j]
            split = None
            reachable = _subvectors_by_area(union, sizes, capacity)
            for a1 in range(capacity, -1, -1):
                if reachable[a1] is None or union_area - a1 > capacity:
                    continue
                s1, s2 = capacity - a1, capacity - (union_area - a1)
                if (s1, s2) == (slacks[bad], slacks[j]):
                    continue
                if fillable(s1) and fillable(s2):
                    split = reachable[a1]
                    break
            if split is None:
                continue
            rest = tuple(union[l] - split[l] for l in range(theta))
            for i in sorted((bad, j), reverse=True):
                if runs[i][1] == 1:
                    runs.pop(i)
                else:
                    runs[i][1] -= 1
            if any(split):
                runs.append([list(split), 1])
            if any(rest):
                runs.append([list(rest), 1])
            changed = True
            break
    return [(tuple(q), m) for q, m in runs]


def _constructive(prof, capacity, deadline, pad):
    """Structure-descending cover heuristic; returns (cost, batches) or None
    when the deadline interrupts.  batches entries are (t, counts, mult)."""
    theta, delta = prof.num_sizes, prof.num_times
    sizes = list(prof.sizes)
    rem = [list(row) for row in prof.nt]
    batches = []
    cost = 0
    for t in range(delta - 1, -1, -1):
        if deadline is not None and time.monotonic() >= deadline:
            return None
        r = [rem[l][t] for l in range(theta)]
        if not any(r):
            continue
        cover = _min_cover(r, sizes, capacity)
        for l in range(theta):
            rem[l][t] = 0
        if pad:
            cover = _repair_stranded_slack(cover, t, rem, sizes, capacity)
        for counts, mult in cover:
            cost += prof.times[t] * mult
            if not pad:
                batches.append((t, tuple(counts), mult))
                continue
            batches.extend(_pad_runs(counts, mult, t, rem, sizes, capacity))
    return cost, batches


def _fill_dp(slack, sizes, avail):
    # densest availability-bounded composition of area <= slack
    theta = len(sizes)
    best: list = [None] * (slack + 1)
    best[0] = tuple([0] * theta)
    for l in range(theta):
        s = sizes[l]
        if not avail[l] or s > slack:
            continue
        cap = min(avail[l], slack // s)
        for a in range(s, slack + 1):
            prev = best[a - s]
            if prev is not None and prev[l] < cap and best[a] is None:
                grown = list(prev)
                grown[l] += 1
                best[a] = tuple(grown)
    for a in range(slack, 0, -1):
        if best[a] is not None:
            return best[a]
    return None


def _pad_runs(counts, mult, t, rem, sizes, capacity):
    # top up each batch with jobs from lower time classes, in identical runs
    theta = len(sizes)
    base_area = sum(counts[l] * sizes[l] for l in range(theta))
    runs = []
    left = mult
    while left > 0:
        avail = [sum(rem[l][tt] for tt in range(t)) for l in range(theta)]
        slack = capacity - base_area
        padv = _fill_dp(slack, sizes, avail) if slack > 0 else None
        if padv is None or not any(padv):
            runs.append((t, tuple(counts), left))
            return runs
        k = min(left, min(avail[l] // padv[l] for l in range(theta) if padv[l]))
        full = tuple(counts[l] + padv[l] for l in range(theta))
        runs.append((t, full, k))
        for l in range(theta):
            need = padv[l] * k
            tt = t - 1
            while need and tt >= 0:
                take = min(rem[l][tt], need)
                rem[l][tt] -= take
                need -= take
                tt -= 1
        left -= k
    return runs


# ---------------------------------------------------------------------------
# Flows
# ---------------------------------------------------------------------------

def batches_to_flows(batches, prof: ClassProfile, graph: ArcFlowGraph) -> Flows:
    """Lay each batch composition along the graph, larger sizes first."""
    flows: Flows = {t: {} for t in range(prof.num_times)}
    capacity = graph.capacity
    fb = graph.feedback_arc
    for t, counts, mult in batches:
        d = flows[t]
        pos = 0
        for l in range(len(counts) - 1, -1, -1):
            for _ in range(counts[l]):
                a = Arc(pos, pos + prof.sizes[l], JOB)
                d[a] = d.get(a, 0) + mult
                pos += prof.sizes[l]
        if pos < capacity:
            a = Arc(pos, capacity, LOSS)
            d[a] = d.get(a, 0) + mult
        d[fb] = d.get(fb, 0) + mult
    return flows


def verify_flow(flows: Flows, instance: Instance) -> bool:
    """Conservation at every node, size linking with nonnegative implied
    carryovers, and all per-structure flow bounds."""
    prof = profile(instance)
    g = reduce_graph(build_graph(prof, instance.capacity))
    ub = arc_bounds(g, prof)
    capacity = instance.capacity
    delta = prof.num_times
    valid_arcs = set(g.arcs)
    fb = g.feedback_arc

    if any(t not in range(delta) for t in flows):
        return False
    for t in range(delta):
        d = flows.get(t, {})
        for a, units in d.items():
            if a not in valid_arcs:
                return False
            if not isinstance(units, int) or units < 0:
                return False
            if units > ub.of(a, t):
                return False
        v = d.get(fb, 0)
        for node in range(capacity + 1):
            balance = 0
            for a, units in d.items():
                if a.kind == FEEDBACK:
                    continue
                if a.head == node:
                    balance += units
                if a.tail == node:
                    balance -= units
            expect = -v if node == 0 else (v if node == capacity else 0)
            if balance != expect:
                return False

    for l, c in enumerate(prof.sizes):
        carry = 0
        for t in range(delta):
            assigned = sum(
                units
                for a, units in flows.get(t, {}).items()
                if a.kind == JOB and a.head - a.tail == c
            )
            carry = carry + prof.nt[l][t] - assigned
            if carry < 0:
                return False
            if t < delta - 1 and carry > prof.nt_plus[l][t]:
                return False
        if carry != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def solve_exact(
    instance: Instance,
    time_limit_s: Optional[float] = None,
    node_limit: Optional[int] = None,
) -> tuple[SolveReport, Flows]:
    """Exact makespan minimization; anytime under time or node limits.

    Returns the report and the per-structure arc flows of the best schedule
    found (empty when no incumbent exists).
    """
    start = time.monotonic()
    require_valid(instance)
    prof = profile(instance)
    capacity = instance.capacity
    g = reduce_graph(build_graph(prof, capacity))
    sizes = list(prof.sizes)
    times = list(prof.times)
    caps = [capacity // s for s in sizes]
    theta, delta = len(sizes), len(times)
    deadline = start + time_limit_s if time_limit_s is not None else None

    rem = [list(row) for row in prof.nt]
    root_sharp = _sharp_bound(rem, sizes, times, caps, capacity)

    def timed_out():
        return deadline is not None and time.monotonic() >= deadline

    def report(status, objective, bound, nodes, batches):
        flows = batches_to_flows(batches, prof, g) if batches is not None else {}
        vt = tuple(
            flows.get(t, {}).get(g.feedback_arc, 0) for t in range(delta)
        ) if batches is not None else None
        return (
            SolveReport(
                status=status,
                objective=objective,
                bound=bound,
                gap=compute_gap(objective, bound),
                nodes=nodes,
                wall_time_s=time.monotonic() - start,
                feedback_flows=vt,
            ),
            flows,
        )

    if timed_out():
        return report(STATUS_TIMELIMIT, None, root_sharp, 0, None)

    best_cost = None
    best_batches = None
    for pad in (True, False):
        got = _constructive(prof, capacity, deadline, pad)
        if got is not None and (best_cost is None or got[0] < best_cost):
            best_cost, best_batches = got
    if best_cost is None:
        return report(STATUS_TIMELIMIT, None, root_sharp, 0, None)

    if best_cost <= root_sharp:
        return report(STATUS_OPTIMAL, best_cost, best_cost, 0, best_batches)
    if timed_out():
        return report(STATUS_TIMELIMIT, best_cost, root_sharp, 0, best_batches)
    if node_limit is not None and node_limit <= 0:
        return report(STATUS_FEASIBLE, best_cost, root_sharp, 0, best_batches)

    # depth-first search state, mutated in place with undo records
    class_tot = [sum(rem[l][t] for l in range(theta)) for t in range(delta)]
    jobs_left = [sum(class_tot)]
    path: list[tuple[int, tuple[int, ...], int]] = []

    def apply_run(t, q, m):
        undo = []
        for l in range(theta):
            need = q[l] * m
            tt = t
            while need:
                take = min(rem[l][tt], need)
                if take:
                    rem[l][tt] -= take
                    class_tot[tt] -= take
                    undo.append((l, tt, take))
                    need -= take
                tt -= 1
        jobs_left[0] -= sum(q) * m
        return undo

    def revert(undo, t, q, m):
        for l, tt, take in undo:
            rem[l][tt] += take
            class_tot[tt] += take
        jobs_left[0] += sum(q) * m

    def top_class():
        for t in range(delta - 1, -1, -1):
            if class_tot[t]:
                return t
        return -1

    def run_max(q, avail, in_class, t):
        # largest multiplicity: stay within availability and give every copy
        # a job of time class exactly t (greedy draws class-t jobs first)
        m_avail = min(avail[l] // q[l] for l in range(theta) if q[l])
        if m_avail < 1:
            return 0

        def ok(m):
            return sum(min(m * q[l], in_class[l]) for l in range(theta) if q[l]) >= m

        if not ok(1):
            return 0
        lo, hi = 1, m_avail
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if ok(mid):
                lo = mid
            else:
                hi = mid - 1
        return lo

    # completion lower bounds per search state; a state is the remaining
    # matrix plus the pattern ceiling inside the current structure, so
    # bounds transfer across the many pattern orders reaching the same
    # residual and sharpen with every exhausted subtree
    memo: dict = {}
    MEMO_CAP = 2_000_000

    def state_key():
        ceiling = None
        if path:
            t = top_class()
            if path[-1][0] == t:
                ceiling = path[-1][1]
        return (tuple(map(tuple, rem)), ceiling)

    def children(cost_here):
        t = top_class()
        ceiling = None
        if path and path[-1][0] == t:
            ceiling = _desc_key(path[-1][1])
        avail = [sum(rem[l][tt] for tt in range(t + 1)) for l in range(theta)]
        in_class = [rem[l][t] for l in range(theta)]

        pats = []
        for q in _patterns_desc(sizes, capacity, avail):
            if not any(q):
                continue
            if ceiling is not None and _desc_key(q) >= ceiling:
                continue
            if not any(q[l] and in_class[l] for l in range(theta)):
                continue
            area = sum(q[l] * sizes[l] for l in range(theta))
            maximal = all(
                area + sizes[l] > capacity or avail[l] <= q[l] for l in range(theta)
            )
            if maximal:
                mm = run_max(q, avail, in_class, t)
                if mm >= 1:
                    pats.append((q, mm))

        # order statically: patterns dense in the current class first, then
        # the multiplicity breakpoints that exhaust a class-t size
        def class_area(q):
            return sum(min(q[l], in_class[l]) * sizes[l] for l in range(theta))

        def area(q):
            return sum(q[l] * sizes[l] for l in range(theta))

        pats.sort(key=lambda qm: (-class_area(qm[0]), -area(qm[0]), _desc_key(qm[0])))
        first = []
        seen = set()
        for q, mm in pats:
            cands = {mm, 1}
            for l in range(theta):
                if q[l] and in_class[l]:
                    cands.add(min(mm, max(1, in_class[l] // q[l])))
                    cands.add(min(mm, -(-in_class[l] // q[l])))
            for m in sorted(cands, reverse=True):
                first.append((q, m))
                seen.add((q, m))

        def gen():
            for q, m in first:
                yield t, q, m
            for q, mm in pats:
                for m in range(mm, 0, -1):
                    if (q, m) not in seen:
                        yield t, q, m

        return gen()

    nodes = 0
    aborted = None
    proven = root_sharp

    def run_pass(threshold):
        """Exhaust the space of solutions cheaper than ``threshold``; either
        proves none exists (return True) or improves the incumbent to a value
        below the threshold.  Completion bounds survive in the memo across
        passes because they never depend on the threshold."""
        nonlocal nodes, aborted, best_cost, best_batches
        stack = [
            {
                "iter": children(0), "cost": 0, "undo": None,
                "move": None, "edge": 0, "acc": inf, "key": None,
            }
        ]
        while stack:
            if node_limit is not None and nodes >= node_limit:
                aborted = STATUS_FEASIBLE
            elif nodes % 64 == 0 and timed_out():
                aborted = STATUS_TIMELIMIT
            if aborted is not None:
                # unwind without storing partially explored frames
                while stack:
                    frame = stack.pop()
                    if frame["undo"] is not None:
                        t, q, m = frame["move"]
                        revert(frame["undo"], t, q, m)
                        path.pop()
                return False
            frame = stack[-1]
            move = next(frame["iter"], None)
            if move is None:
                stack.pop()
                if frame["key"] is not None and len(memo) < MEMO_CAP:
                    old = memo.get(frame["key"])
                    if old is None or frame["acc"] > old:
                        memo[frame["key"]] = frame["acc"]
                if stack:
                    parent = stack[-1]
                    parent["acc"] = min(parent["acc"], frame["edge"] + frame["acc"])
                if frame["undo"] is not None:
                    t, q, m = frame["move"]
                    revert(frame["undo"], t, q, m)
                    path.pop()
                continue
            t, q, m = move
            nodes += 1
            undo = apply_run(t, q, m)
            edge = m * times[t]
            cost2 = frame["cost"] + edge
            path.append((t, q, m))
            if jobs_left[0] == 0:
                if cost2 < best_cost:
                    best_cost = cost2
                    best_batches = list(path)
                frame["acc"] = min(frame["acc"], edge)
                revert(undo, t, q, m)
                path.pop()
                if cost2 < threshold:
                    while stack:
                        fr = stack.pop()
                        if fr["undo"] is not None:
                            t, q, m = fr["move"]
                            revert(fr["undo"], t, q, m)
                            path.pop()
                    return False
                continue
            completion_lb = _sharp_bound(rem, sizes, times, caps, capacity)
            key = state_key()
            known = memo.get(key)
            if known is not None and known > completion_lb:
                completion_lb = known
            if cost2 + completion_lb >= threshold:
                frame["acc"] = min(frame["acc"], edge + completion_lb)
                revert(undo, t, q, m)
                path.pop()
                continue
            stack.append(
                {
                    "iter": children(cost2),
                    "cost": cost2,
                    "undo": undo,
                    "move": move,
                    "edge": edge,
                    "acc": inf,
                    "key": key,
                }
            )
        return True

    # raise the certified bound one unit at a time toward the incumbent;
    # a pass that finds a solution below its threshold must have hit the
    # proven floor exactly, which also closes the gap
    while proven < best_cost and aborted is None:
        if run_pass(proven + 1):
            proven += 1

    if aborted is None:
        return report(STATUS_OPTIMAL, best_cost, best_cost, nodes, best_batches)
    return report(aborted, best_cost, min(best_cost, proven), nodes, best_batches)
