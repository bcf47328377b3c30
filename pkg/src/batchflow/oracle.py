"""Independent brute-force references for tiny instances.

Two separate enumerations are kept on purpose: one walks set partitions in
restricted-growth order with capacity pruning, the other runs a
subset-cost dynamic program over bitmasks.  They certify each other and the
rest of the toolkit.
"""

from __future__ import annotations

from .decode import Batch, Schedule
from .instance import Instance, require_valid

HARD_CAP = 10


def brute_force(
    instance: Instance, hard_cap_n: int = HARD_CAP, allow_large: bool = False
) -> tuple[int, Schedule]:
    """Exhaustive partition search; returns the optimum and one schedule."""
    require_valid(instance)
    n = instance.n_jobs
    if n > hard_cap_n and not allow_large:
        raise ValueError(f"brute force capped at n={hard_cap_n} (got {n})")
    jobs = instance.jobs
    capacity = instance.capacity

    best_cost = sum(j.processing_time for j in jobs)  # one batch per job
    best_parts = [[j] for j in jobs]
    parts: list[list] = []
    sizes: list[int] = []
    pmaxes: list[int] = []

    def rec(i, cost):
        nonlocal best_cost, best_parts
        if cost >= best_cost:
            return
        if i == n:
            best_cost = cost
            best_parts = [list(p) for p in parts]
            return
        job = jobs[i]
        for b in range(len(parts)):
            if sizes[b] + job.size <= capacity:
                old_pmax = pmaxes[b]
                parts[b].append(job)
                sizes[b] += job.size
                pmaxes[b] = max(old_pmax, job.processing_time)
                rec(i + 1, cost + pmaxes[b] - old_pmax)
                parts[b].pop()
                sizes[b] -= job.size
                pmaxes[b] = old_pmax
        parts.append([job])
        sizes.append(job.size)
        pmaxes.append(job.processing_time)
        rec(i + 1, cost + job.processing_time)
        parts.pop()
        sizes.pop()
        pmaxes.pop()

    rec(0, 0)
    batches = tuple(
        Batch(
            job_ids=tuple(j.id for j in part),
            processing_time=max(j.processing_time for j in part),
            used_capacity=sum(j.size for j in part),
        )
        for part in best_parts
    )
    batches = tuple(sorted(batches, key=lambda b: (b.processing_time, b.job_ids)))
    return best_cost, Schedule(batches=batches)


def brute_force_dp(instance: Instance, hard_cap_n: int = 12) -> int:
    """Optimal makespan by dynamic programming over job subsets."""
    require_valid(instance)
    n = instance.n_jobs
    if n > hard_cap_n:
        raise ValueError(f"subset DP capped at n={hard_cap_n} (got {n})")
    jobs = instance.jobs
    capacity = instance.capacity

    full = 1 << n
    size_of = [0] * full
    pmax_of = [0] * full
    for mask in range(1, full):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        size_of[mask] = size_of[rest] + jobs[low].size
        pmax_of[mask] = max(pmax_of[rest], jobs[low].processing_time)

    INF = float("inf")
    dp = [INF] * full
    dp[0] = 0
    for mask in range(1, full):
        low_bit = mask & -mask
        sub = mask
        while sub:
            if sub & low_bit and size_of[sub] <= capacity:
                cand = dp[mask ^ sub] + pmax_of[sub]
                if cand < dp[mask]:
                    dp[mask] = cand
            sub = (sub - 1) & mask
    return int(dp[full - 1])
