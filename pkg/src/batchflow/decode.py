"""Map arc flows to explicit job-to-batch schedules and validate schedules.

Structures are decoded in ascending processing-time order so that every job
arc always finds an eligible unassigned job.  Each structure's flow is split
into unit paths by repeatedly walking from node 0 along the lowest-headed arc
with residual flow, finishing on the loss arc when it ties a job arc; each
job arc then takes the eligible unassigned job with the largest processing
time, lowest id.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from pathlib import Path

from .graph import FEEDBACK, JOB, LOSS, Arc, build_graph, reduce_graph
from .instance import Instance, profile, require_valid
from .solver import Flows, verify_flow


@dataclass(frozen=True)
class Batch:
    job_ids: tuple[int, ...]
    processing_time: int
    used_capacity: int


@dataclass(frozen=True)
class Schedule:
    batches: tuple[Batch, ...]

    @property
    def makespan(self) -> int:
        return sum(b.processing_time for b in self.batches)


def makespan(schedule: Schedule) -> int:
    return schedule.makespan


class _JobPool:
    """Unassigned jobs per size, served largest processing time first."""

    def __init__(self, instance: Instance):
        self.by_size: dict[int, dict[int, list[int]]] = {}
        self.ptimes: dict[int, list[int]] = {}
        for job in sorted(instance.jobs, key=lambda j: (j.processing_time, j.id)):
            bucket = self.by_size.setdefault(job.size, {})
            bucket.setdefault(job.processing_time, []).append(job.id)
        for size, bucket in self.by_size.items():
            self.ptimes[size] = sorted(bucket)

    def take(self, size: int, max_time: int) -> tuple[int, int]:
        plist = self.ptimes.get(size, [])
        i = bisect.bisect_right(plist, max_time) - 1
        if i < 0:
            raise RuntimeError(
                f"no unassigned job of size {size} with time <= {max_time}"
            )
        p = plist[i]
        ids = self.by_size[size][p]
        job_id = ids.pop(0)
        if not ids:
            del self.by_size[size][p]
            plist.pop(i)
        return job_id, p


def _unit_paths(structure_flows: dict[Arc, int], units: int, capacity: int):
    residual = {
        a: u for a, u in structure_flows.items() if a.kind != FEEDBACK and u > 0
    }
    out: dict[int, list[Arc]] = {}
    for a in residual:
        out.setdefault(a.tail, []).append(a)
    # lowest head first; loss before job when both reach the sink
    for arcs in out.values():
        arcs.sort(key=lambda a: (a.head, 0 if a.kind == LOSS else 1))
    paths = []
    for _ in range(units):
        node = 0
        path = []
        while node != capacity:
            arc = next(
                (a for a in out.get(node, ()) if residual.get(a, 0) > 0), None
            )
            if arc is None:
                raise RuntimeError(f"flow decomposition stuck at node {node}")
            residual[arc] -= 1
            path.append(arc)
            node = arc.head
        paths.append(path)
    return paths


def decode(flows: Flows, instance: Instance) -> Schedule:
    """Turn verified flows into a schedule with makespan sum(P_t * v_t)."""
    require_valid(instance)
    if not verify_flow(flows, instance):
        raise ValueError("flows fail verification")
    prof = profile(instance)
    g = reduce_graph(build_graph(prof, instance.capacity))
    pool = _JobPool(instance)
    batches = []
    for t in range(prof.num_times):
        d = flows.get(t, {})
        v = d.get(g.feedback_arc, 0)
        if not v:
            continue
        for path in _unit_paths(d, v, instance.capacity):
            ids = []
            used = 0
            p_max = 0
            for arc in path:
                if arc.kind != JOB:
                    continue
                size = arc.head - arc.tail
                job_id, p = pool.take(size, prof.times[t])
                ids.append(job_id)
                used += size
                p_max = max(p_max, p)
            batches.append(
                Batch(job_ids=tuple(ids), processing_time=p_max, used_capacity=used)
            )
    return Schedule(batches=tuple(batches))


def encode_schedule(schedule: Schedule, instance: Instance) -> Flows:
    """Back-map a schedule to flows (sizes laid largest first per batch)."""
    prof = profile(instance)
    g = reduce_graph(build_graph(prof, instance.capacity))
    by_id = {j.id: j for j in instance.jobs}
    tindex = {p: t for t, p in enumerate(prof.times)}
    flows: Flows = {t: {} for t in range(prof.num_times)}
    for batch in schedule.batches:
        t = tindex[batch.processing_time]
        d = flows[t]
        pos = 0
        for size in sorted((by_id[i].size for i in batch.job_ids), reverse=True):
            a = Arc(pos, pos + size, JOB)
            d[a] = d.get(a, 0) + 1
            pos += size
        if pos < instance.capacity:
            a = Arc(pos, instance.capacity, LOSS)
            d[a] = d.get(a, 0) + 1
        fb = g.feedback_arc
        d[fb] = d.get(fb, 0) + 1
    return flows


def validate_schedule(schedule: Schedule, instance: Instance) -> list[str]:
    """Empty iff the schedule is a feasible solution of the instance."""
    violations = []
    by_id = {j.id: j for j in instance.jobs}
    seen: set[int] = set()
    for k, batch in enumerate(schedule.batches, 1):
        if not batch.job_ids:
            violations.append(f"batch {k}: empty")
            continue
        used = 0
        p_max = 0
        for job_id in batch.job_ids:
            if job_id not in by_id:
                violations.append(f"batch {k}: unknown job {job_id}")
                continue
            if job_id in seen:
                violations.append(f"job {job_id}: assigned more than once")
            seen.add(job_id)
            used += by_id[job_id].size
            p_max = max(p_max, by_id[job_id].processing_time)
        if used > instance.capacity:
            violations.append(
                f"batch {k}: size {used} exceeds capacity {instance.capacity}"
            )
        if batch.used_capacity != used:
            violations.append(f"batch {k}: recorded capacity {batch.used_capacity} != {used}")
        if p_max and batch.processing_time != p_max:
            violations.append(
                f"batch {k}: processing time {batch.processing_time} != max member time {p_max}"
            )
    for job in instance.jobs:
        if job.id not in seen:
            violations.append(f"job {job.id}: not assigned to any batch")
    return violations


# ---------------------------------------------------------------------------
# Schedule file: one line "P: id,id,..." per batch, then "makespan <value>".
# ---------------------------------------------------------------------------

def write_schedule(schedule: Schedule, path) -> None:
    lines = [
        f"{b.processing_time}: " + ",".join(str(i) for i in b.job_ids)
        for b in schedule.batches
    ]
    lines.append(f"makespan {schedule.makespan}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_schedule(path, instance: Instance) -> Schedule:
    by_id = {j.id: j for j in instance.jobs}
    batches = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("makespan"):
            continue
        head, _, rest = line.partition(":")
        ids = tuple(int(tok) for tok in rest.split(",") if tok.strip())
        used = sum(by_id[i].size for i in ids if i in by_id)
        batches.append(
            Batch(job_ids=ids, processing_time=int(head), used_capacity=used)
        )
    return Schedule(batches=tuple(batches))
