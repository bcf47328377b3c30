"""Solver-neutral integer programs and the three model builders.

Three formulations of the same problem are compiled here: the classic
assignment model (milp1), its symmetry-reduced triangular variant
(milp1plus), and the arc-flow model (flow) whose size depends only on the
distinct sizes, distinct processing times and the capacity, never on the
number of jobs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import graph as graphmod
from .instance import Instance, profile, require_valid

LE, EQ, GE = "<=", "=", ">="


@dataclass(frozen=True)
class Variable:
    name: str
    lb: float = 0.0
    ub: float = 0.0
    integer: bool = False
    obj: float = 0.0


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: tuple[tuple[str, float], ...]
    relation: str
    rhs: float


@dataclass
class MilpModel:
    """Minimization model: variables, linear constraints, metadata."""

    name: str
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    sense: str = "min"
    meta: dict = field(default_factory=dict)

    def add_var(self, name, lb=0.0, ub=0.0, integer=False, obj=0.0) -> str:
        self.variables.append(Variable(name, lb, ub, integer, obj))
        return name

    def add_con(self, name, coeffs, relation, rhs) -> None:
        self.constraints.append(Constraint(name, tuple(coeffs), relation, rhs))

    def var_names(self) -> set[str]:
        return {v.name for v in self.variables}

    def objective_value(self, values: dict[str, float]) -> float:
        return sum(v.obj * values.get(v.name, 0.0) for v in self.variables)

    def check(self) -> list[str]:
        """Structural invariants; returns one message per violation."""
        problems = []
        names = [v.name for v in self.variables]
        if len(names) != len(set(names)):
            problems.append("duplicate variable names")
        declared = set(names)
        for v in self.variables:
            if v.lb > v.ub:
                problems.append(f"variable {v.name}: lb {v.lb} > ub {v.ub}")
        for c in self.constraints:
            for name, _ in c.coeffs:
                if name not in declared:
                    problems.append(f"constraint {c.name}: unknown variable {name}")
            if c.relation not in (LE, EQ, GE):
                problems.append(f"constraint {c.name}: bad relation {c.relation}")
        return problems

    def stats(self) -> dict:
        return {
            "name": self.name,
            "num_variables": len(self.variables),
            "num_integer": sum(1 for v in self.variables if v.integer),
            "num_constraints": len(self.constraints),
            "num_nonzeros": sum(len(c.coeffs) for c in self.constraints),
        }


def build_milp1(instance: Instance) -> MilpModel:
    """Assignment model: binaries x[j,k], y[k], continuous batch times C[k].

    Batches are indexed 1..n_J; capping the batch count at the job count is
    safe because splitting batches can only be forced by the optimizer, and
    n_J batches always suffice.
    """
    require_valid(instance)
    jobs = instance.jobs
    n = len(jobs)
    max_p = max(j.processing_time for j in jobs)
    m = MilpModel(name=f"milp1-{instance.name}")
    for j in jobs:
        for k in range(1, n + 1):
            m.add_var(f"x_{j.id}_{k}", 0, 1, integer=True)
    for k in range(1, n + 1):
        m.add_var(f"y_{k}", 0, 1, integer=True)
    for k in range(1, n + 1):
        m.add_var(f"C_{k}", 0, max_p, integer=False, obj=1)

    for j in jobs:
        m.add_con(
            f"assign_{j.id}",
            [(f"x_{j.id}_{k}", 1) for k in range(1, n + 1)],
            EQ,
            1,
        )
    for k in range(1, n + 1):
        coeffs = [(f"x_{j.id}_{k}", j.size) for j in jobs]
        coeffs.append((f"y_{k}", -instance.capacity))
        m.add_con(f"cap_{k}", coeffs, LE, 0)
    for j in jobs:
        for k in range(1, n + 1):
            m.add_con(
                f"ptime_{j.id}_{k}",
                [(f"C_{k}", 1), (f"x_{j.id}_{k}", -j.processing_time)],
                GE,
                0,
            )
    # Redundant with the capacity rows, kept to strengthen the relaxation.
    for j in jobs:
        for k in range(1, n + 1):
            m.add_con(
                f"use_{j.id}_{k}",
                [(f"x_{j.id}_{k}", 1), (f"y_{k}", -1)],
                LE,
                0,
            )
    return m


def build_milp1_plus(instance: Instance) -> MilpModel:
    """Triangular model over jobs reindexed by nondecreasing processing time.

    Batch k is usable only when job k sits in it, and job j may only join
    batches k >= j; ties in processing time break by original id so the
    reindexing is reproducible.  meta["job_order"] maps position (1-based)
    back to the original job id for schedule recovery.
    """
    require_valid(instance)
    order = sorted(instance.jobs, key=lambda j: (j.processing_time, j.id))
    n = len(order)
    m = MilpModel(name=f"milp1plus-{instance.name}")
    m.meta["job_order"] = tuple(j.id for j in order)

    for j in range(1, n + 1):
        for k in range(j, n + 1):
            obj = order[j - 1].processing_time if j == k else 0
            m.add_var(f"x_{j}_{k}", 0, 1, integer=True, obj=obj)

    for j in range(1, n + 1):
        m.add_con(
            f"assign_{j}",
            [(f"x_{j}_{k}", 1) for k in range(j, n + 1)],
            EQ,
            1,
        )
    for k in range(1, n + 1):
        coeffs = [(f"x_{j}_{k}", order[j - 1].size) for j in range(1, k)]
        coeffs.append((f"x_{k}_{k}", order[k - 1].size - instance.capacity))
        m.add_con(f"cap_{k}", coeffs, LE, 0)
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            m.add_con(
                f"use_{j}_{k}",
                [(f"x_{j}_{k}", 1), (f"x_{k}_{k}", -1)],
                LE,
                0,
            )
    return m


def build_flow(instance: Instance) -> MilpModel:
    """Arc-flow model over the reduced graph, one structure per distinct time.

    Variables: f (job-arc flows), yl (loss-arc flows), v (feedback flows,
    weighted by the processing time in the objective) and z (per-size
    carryover to the next structure, declared for t < delta only).  Linking
    rows hand unassigned jobs of each size from one structure to the next.
    Structurally empty rows and carryover variables with a zero bound are
    omitted; the feasible set is unchanged.
    """
    require_valid(instance)
    prof = profile(instance)
    g = graphmod.reduce_graph(graphmod.build_graph(prof, instance.capacity))
    ub = graphmod.bounds(g, prof)
    delta = prof.num_times
    B = instance.capacity

    m = MilpModel(name=f"flow-{instance.name}")
    m.meta["times"] = prof.times
    m.meta["sizes"] = prof.sizes

    job_arcs = g.job_arcs()
    loss_arcs = g.loss_arcs()
    fb = g.feedback_arc

    def fname(a, t):
        return f"f_{a.tail}_{a.head}_{t + 1}"

    def lname(a, t):
        return f"yl_{a.tail}_{t + 1}"

    for t in range(delta):
        for a in job_arcs:
            m.add_var(fname(a, t), 0, ub.of(a, t), integer=True)
        for a in loss_arcs:
            m.add_var(lname(a, t), 0, ub.of(a, t), integer=True)
        m.add_var(f"v_{t + 1}", 0, prof.nj[t], integer=True, obj=prof.times[t])
    z_declared = set()
    for t in range(delta - 1):
        for l, c in enumerate(prof.sizes):
            if prof.nt_plus[l][t] >= 1:
                m.add_var(f"z_{c}_{t + 1}", 0, prof.nt_plus[l][t], integer=True)
                z_declared.add((c, t))

    # Conservation at every node touched by a surviving arc; the feedback
    # flow enters at node 0 and leaves at node B.
    in_arcs: dict[int, list] = {}
    out_arcs: dict[int, list] = {}
    for a in job_arcs + loss_arcs:
        out_arcs.setdefault(a.tail, []).append(a)
        in_arcs.setdefault(a.head, []).append(a)
    touched = sorted(set(in_arcs) | set(out_arcs) | {0, B})
    for t in range(delta):
        for node in touched:
            coeffs = []
            for a in in_arcs.get(node, []):
                coeffs.append((fname(a, t) if a.kind == graphmod.JOB else lname(a, t), 1))
            for a in out_arcs.get(node, []):
                coeffs.append((fname(a, t) if a.kind == graphmod.JOB else lname(a, t), -1))
            if node == 0:
                coeffs.append((f"v_{t + 1}", 1))
            elif node == B:
                coeffs.append((f"v_{t + 1}", -1))
            m.add_con(f"cons_n{node}_t{t + 1}", coeffs, EQ, 0)

    # Linking rows: new jobs of size c at time t plus the carryover from
    # structure t-1 equal the flow assigned at t plus the carryover to t+1.
    arcs_by_size: dict[int, list] = {}
    for a in job_arcs:
        arcs_by_size.setdefault(a.head - a.tail, []).append(a)
    for l, c in enumerate(prof.sizes):
        for t in range(delta):
            coeffs = [(fname(a, t), 1) for a in arcs_by_size.get(c, [])]
            if (c, t) in z_declared:
                coeffs.append((f"z_{c}_{t + 1}", 1))
            if (c, t - 1) in z_declared:
                coeffs.append((f"z_{c}_{t}", -1))
            m.add_con(f"link_c{c}_t{t + 1}", coeffs, EQ, prof.nt[l][t])
    return m


BUILDERS = {
    "milp1": build_milp1,
    "milp1plus": build_milp1_plus,
    "flow": build_flow,
}


def lp_relaxation(model: MilpModel) -> MilpModel:
    """Same model with every integrality flag cleared; idempotent."""
    relaxed = MilpModel(
        name=model.name if model.name.endswith("-relax") else model.name + "-relax",
        variables=[
            Variable(v.name, v.lb, v.ub, False, v.obj) for v in model.variables
        ],
        constraints=list(model.constraints),
        sense=model.sense,
        meta=dict(model.meta),
    )
    return relaxed
