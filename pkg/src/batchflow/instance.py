"""Problem input: jobs, instances, class profiles, generators and file I/O.

An instance of the single batch-processing-machine problem is a multiset of
jobs, each with an integer size and processing time, plus the machine
capacity B.  Jobs with equal (size, time) keep distinct ids; collapsing into
classes happens only in :func:`profile`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .rng import SplitMix64


@dataclass(frozen=True, slots=True)
class Job:
    id: int
    size: int
    processing_time: int


@dataclass(frozen=True)
class Instance:
    """A job multiset plus the machine capacity."""

    jobs: tuple[Job, ...]
    capacity: int
    name: str = "instance"
    seed: Optional[int] = None

    @property
    def n_jobs(self) -> int:
        return len(self.jobs)


@dataclass(frozen=True)
class ClassProfile:
    """Distinct processing times / sizes and the per-class count tables.

    nt[l][t] counts jobs with size sizes[l] and time times[t];
    nt_plus[l][t] cumulates nt over times <= times[t]; nj[t] sums nt over
    sizes.  times and sizes are strictly increasing.
    """

    times: tuple[int, ...]
    sizes: tuple[int, ...]
    nt: tuple[tuple[int, ...], ...]
    nt_plus: tuple[tuple[int, ...], ...]
    nj: tuple[int, ...]

    @property
    def num_times(self) -> int:
        return len(self.times)

    @property
    def num_sizes(self) -> int:
        return len(self.sizes)

    def size_index(self, size: int) -> int:
        lo, hi = 0, len(self.sizes) - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            if self.sizes[mid] < size:
                lo = mid + 1
            elif self.sizes[mid] > size:
                hi = mid - 1
            else:
                return mid
        raise KeyError(f"size {size} not in profile")


def validate(instance: Instance) -> list[str]:
    """Check instance invariants; returns one message per violation."""
    violations = []
    if instance.capacity < 1:
        violations.append(f"capacity {instance.capacity} below 1")
    if instance.n_jobs < 1:
        violations.append("instance has no jobs")
    seen = set()
    for job in instance.jobs:
        if job.id < 1:
            violations.append(f"job {job.id}: id below 1")
        if job.id in seen:
            violations.append(f"job {job.id}: duplicate id")
        seen.add(job.id)
        if job.size < 1:
            violations.append(f"job {job.id}: size below 1")
        if job.processing_time < 1:
            violations.append(f"job {job.id}: processing time below 1")
        if job.size > instance.capacity:
            violations.append(
                f"job {job.id}: size {job.size} exceeds capacity {instance.capacity}"
            )
    return violations


def require_valid(instance: Instance) -> None:
    violations = validate(instance)
    if violations:
        raise ValueError("invalid instance: " + "; ".join(violations))


def profile(instance: Instance) -> ClassProfile:
    """Collapse the job multiset into (size, time) class count tables."""
    require_valid(instance)
    counts: dict[tuple[int, int], int] = {}
    for job in instance.jobs:
        key = (job.size, job.processing_time)
        counts[key] = counts.get(key, 0) + 1

    sizes = sorted({s for s, _ in counts})
    times = sorted({p for _, p in counts})
    sidx = {s: i for i, s in enumerate(sizes)}
    tidx = {p: i for i, p in enumerate(times)}

    nt = [[0] * len(times) for _ in sizes]
    for (s, p), c in counts.items():
        nt[sidx[s]][tidx[p]] = c

    nt_plus = []
    for row in nt:
        acc, cum = [], 0
        for c in row:
            cum += c
            acc.append(cum)
        nt_plus.append(acc)

    nj = [sum(nt[l][t] for l in range(len(sizes))) for t in range(len(times))]
    return ClassProfile(
        times=tuple(times),
        sizes=tuple(sizes),
        nt=tuple(tuple(r) for r in nt),
        nt_plus=tuple(tuple(r) for r in nt_plus),
        nj=tuple(nj),
    )


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def _uniform_instance(n_jobs, time_range, size_range, capacity, seed, name):
    t_lo, t_hi = time_range
    s_lo, s_hi = size_range
    if n_jobs < 1:
        raise ValueError("n_jobs must be >= 1")
    if t_lo < 1 or t_lo > t_hi:
        raise ValueError(f"bad time interval [{t_lo}, {t_hi}]")
    if s_lo < 1 or s_lo > s_hi:
        raise ValueError(f"bad size interval [{s_lo}, {s_hi}]")
    if s_hi > capacity:
        raise ValueError(f"size interval upper bound {s_hi} exceeds capacity {capacity}")
    rng = SplitMix64(seed)
    jobs = []
    for j in range(1, n_jobs + 1):
        size = rng.randint(s_lo, s_hi)
        ptime = rng.randint(t_lo, t_hi)
        jobs.append(Job(id=j, size=size, processing_time=ptime))
    return Instance(jobs=tuple(jobs), capacity=capacity, name=name, seed=seed)


def generate_chen(n_jobs, time_range, size_range, capacity=10, seed=0) -> Instance:
    """Uniform instance in the style of the Chen benchmark family.

    Canonical parameter grid: p in {[1,10], [1,20]}, s in {[1,10], [2,4],
    [4,8]}, B = 10, n up to 500.  Any valid ranges are accepted.
    """
    name = (
        f"chen-n{n_jobs}-p{time_range[0]}_{time_range[1]}"
        f"-s{size_range[0]}_{size_range[1]}-B{capacity}-seed{seed}"
    )
    return _uniform_instance(n_jobs, time_range, size_range, capacity, seed, name)


def generate_muter(n_jobs, time_range, size_range, capacity=10, seed=0) -> Instance:
    """Uniform instance in the style of the Muter benchmark family.

    Same mechanics as :func:`generate_chen`; canonical grid adds the
    [1,100] processing-time interval and caps n at 100.
    """
    name = (
        f"muter-n{n_jobs}-p{time_range[0]}_{time_range[1]}"
        f"-s{size_range[0]}_{size_range[1]}-B{capacity}-seed{seed}"
    )
    return _uniform_instance(n_jobs, time_range, size_range, capacity, seed, name)


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


TIME_MODES = ("p1", "p2")
SIZE_MODES = ("s1", "s2", "s3")


def generate_new(n_jobs, time_mode, size_mode, capacity, seed=0) -> Instance:
    """Uniform instance from the capacity-proportional family.

    time_mode: p1 = [1, 20], p2 = [1, n_jobs].
    size_mode: s1 = [1, B], s2 = [0.2B, 0.4B], s3 = [0.4B, 0.8B], endpoints
    rounded half-up (integral anyway for B in {20, 50, 100}).
    """
    if time_mode not in TIME_MODES:
        raise ValueError(f"time_mode must be one of {TIME_MODES}")
    if size_mode not in SIZE_MODES:
        raise ValueError(f"size_mode must be one of {SIZE_MODES}")
    if capacity not in (20, 50, 100):
        warnings.warn(
            f"capacity {capacity} outside the canonical set {{20, 50, 100}}",
            stacklevel=2,
        )
    time_range = (1, 20) if time_mode == "p1" else (1, n_jobs)
    if size_mode == "s1":
        size_range = (1, capacity)
    elif size_mode == "s2":
        size_range = (_round_half_up(0.2 * capacity), _round_half_up(0.4 * capacity))
    else:
        size_range = (_round_half_up(0.4 * capacity), _round_half_up(0.8 * capacity))
    name = f"new-n{n_jobs}-{time_mode}-{size_mode}-B{capacity}-seed{seed}"
    return _uniform_instance(n_jobs, time_range, size_range, capacity, seed, name)


# ---------------------------------------------------------------------------
# File format: line 1 "n_J B"; then one "id size processing_time" line per
# job; '#' starts a comment; optional trailing "seed <u64>".
# ---------------------------------------------------------------------------

def write_instance(instance: Instance, path) -> None:
    path = Path(path)
    lines = [f"# name: {instance.name}", f"{instance.n_jobs} {instance.capacity}"]
    for job in instance.jobs:
        lines.append(f"{job.id} {job.size} {job.processing_time}")
    if instance.seed is not None:
        lines.append(f"seed {instance.seed}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_instance(path) -> Instance:
    path = Path(path)
    name = path.stem
    seed = None
    jobs = []
    header = None
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("name:"):
                name = body[len("name:"):].strip()
            continue
        if line.startswith("seed "):
            seed = int(line.split()[1])
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 2:
                raise ValueError(f"{path}: bad header line {line!r}")
            header = (int(fields[0]), int(fields[1]))
            continue
        if len(fields) != 3:
            raise ValueError(f"{path}: bad job line {line!r}")
        jobs.append(Job(id=int(fields[0]), size=int(fields[1]), processing_time=int(fields[2])))
    if header is None:
        raise ValueError(f"{path}: missing header line")
    n, capacity = header
    if len(jobs) != n:
        raise ValueError(f"{path}: header says {n} jobs, found {len(jobs)}")
    instance = Instance(jobs=tuple(jobs), capacity=capacity, name=name, seed=seed)
    require_valid(instance)
    return instance
