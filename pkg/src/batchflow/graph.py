"""Arc-flow graph over batch positions {0..B}: build, reduce, bound.

Nodes are the integer positions of a batch of capacity B.  Job arcs (i, j)
exist when j - i is a distinct job size; loss arcs (i, B) carry terminal
slack; the single feedback arc (B, 0) counts batches.  Reduction removes job
arcs not on any continuous flow from node 0 and loss arcs whose tail is not
the head of a surviving job arc.  One graph is shared read-only by all
per-processing-time structures; only the flow bounds differ.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional

from .instance import ClassProfile

JOB = "job"
LOSS = "loss"
FEEDBACK = "feedback"


class Arc(NamedTuple):
    tail: int
    head: int
    kind: str


@dataclass(frozen=True)
class ArcFlowGraph:
    capacity: int
    arcs: tuple[Arc, ...]
    reduced: bool = False
    reachable: Optional[frozenset[int]] = None

    @property
    def nodes(self) -> range:
        return range(self.capacity + 1)

    def job_arcs(self) -> list[Arc]:
        return [a for a in self.arcs if a.kind == JOB]

    def loss_arcs(self) -> list[Arc]:
        return [a for a in self.arcs if a.kind == LOSS]

    @property
    def feedback_arc(self) -> Arc:
        return Arc(self.capacity, 0, FEEDBACK)


def build_graph(prof: ClassProfile, capacity: int) -> ArcFlowGraph:
    """Build the unreduced graph for the profile's distinct sizes."""
    if prof.sizes and prof.sizes[-1] > capacity:
        raise ValueError(
            f"size {prof.sizes[-1]} exceeds capacity {capacity}"
        )
    arcs = []
    for size in prof.sizes:
        for i in range(capacity - size + 1):
            arcs.append(Arc(i, i + size, JOB))
    for i in range(1, capacity):
        arcs.append(Arc(i, capacity, LOSS))
    arcs.append(Arc(capacity, 0, FEEDBACK))
    arcs.sort()
    return ArcFlowGraph(capacity=capacity, arcs=tuple(arcs))


def reduce_graph(graph: ArcFlowGraph) -> ArcFlowGraph:
    """Apply both reduction rules; idempotent."""
    sizes = sorted({a.head - a.tail for a in graph.arcs if a.kind == JOB})
    capacity = graph.capacity

    # Fixpoint of rule 1: nodes reachable from 0 along job arcs.
    reachable = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for s in sizes:
            j = i + s
            if j <= capacity and j not in reachable:
                reachable.add(j)
                frontier.append(j)

    # Rule 1 keeps job arcs whose tail is reachable; rule 2 keeps loss arcs
    # whose tail is the head of a surviving job arc.
    job_heads = set()
    kept = []
    for a in graph.arcs:
        if a.kind == JOB and a.tail in reachable:
            kept.append(a)
            job_heads.add(a.head)
    for a in graph.arcs:
        if a.kind == LOSS and a.tail in job_heads:
            kept.append(a)
    kept.append(Arc(capacity, 0, FEEDBACK))
    kept.sort()
    return ArcFlowGraph(
        capacity=capacity,
        arcs=tuple(kept),
        reduced=True,
        reachable=frozenset(reachable),
    )


@dataclass(frozen=True)
class ArcBounds:
    """Per (arc, structure) flow upper bounds.

    Job arcs are capped by min(jobs in the time class, jobs of the arc's
    size with time not above the class); loss and feedback arcs only by the
    time-class count.
    """

    upper: dict[tuple[Arc, int], int]

    def of(self, arc: Arc, t: int) -> int:
        return self.upper[(arc, t)]


def bounds(graph: ArcFlowGraph, prof: ClassProfile) -> ArcBounds:
    upper = {}
    for t in range(prof.num_times):
        nj = prof.nj[t]
        for a in graph.arcs:
            if a.kind == JOB:
                l = prof.size_index(a.head - a.tail)
                upper[(a, t)] = min(nj, prof.nt_plus[l][t])
            else:
                upper[(a, t)] = nj
        fb = graph.feedback_arc
        if (fb, t) not in upper:
            upper[(fb, t)] = nj
    return ArcBounds(upper=upper)


def size_report(prof: ClassProfile, capacity: int) -> dict:
    graph = build_graph(prof, capacity)
    reduced = reduce_graph(graph)
    return {
        "num_nodes": capacity + 1,
        "num_arcs_pre": len(graph.arcs),
        "num_arcs_post": len(reduced.arcs),
        "num_structures": prof.num_times,
    }


def expected_arc_count(sizes, capacity: int) -> int:
    """Closed-form pre-reduction arc count: theta + (theta+1)B - sum(S)."""
    theta = len(sizes)
    return theta + (theta + 1) * capacity - sum(sizes)


def dump_arcs(graph: ArcFlowGraph) -> str:
    """One arc per line: `kind tail head`."""
    return "\n".join(f"{a.kind} {a.tail} {a.head}" for a in graph.arcs) + "\n"


def to_dot(graph: ArcFlowGraph) -> str:
    """DOT export for visual inspection; guarded to small capacities."""
    if graph.capacity > 50:
        raise ValueError("DOT export is limited to capacity <= 50")
    lines = ["digraph arcflow {", "  rankdir=LR;"]
    for n in graph.nodes:
        lines.append(f"  n{n} [label=\"{n}\", shape=circle];")
    styles = {JOB: "solid", LOSS: "dashed", FEEDBACK: "dotted"}
    for a in graph.arcs:
        label = str(a.head - a.tail) if a.kind == JOB else a.kind
        lines.append(
            f"  n{a.tail} -> n{a.head} [style={styles[a.kind]}, label=\"{label}\"];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(graph: ArcFlowGraph, path) -> None:
    Path(path).write_text(to_dot(graph), encoding="utf-8")
