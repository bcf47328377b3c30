import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from batchflow.graph import FEEDBACK, JOB, LOSS, Arc, build_graph, reduce_graph
from batchflow.instance import Instance, Job, generate_chen, profile
from batchflow.oracle import brute_force, brute_force_dp
from batchflow.solver import (
    batches_to_flows,
    enumerate_patterns,
    lower_bound,
    solve_exact,
    verify_flow,
)


class TestSolveExact:
    def test_four_jobs_optimum(self, four_job_instance):
        rep, flows = solve_exact(four_job_instance)
        assert rep.status == "Optimal"
        assert rep.objective == 12
        assert rep.bound == 12
        assert rep.gap == 0.0
        assert verify_flow(flows, four_job_instance)

    def test_fifteen_jobs_optimum_and_feedback(self, fifteen_job_instance):
        rep, flows = solve_exact(fifteen_job_instance)
        assert rep.objective == 24
        assert rep.feedback_flows == (2, 2, 2)

    def test_single_job(self):
        inst = Instance(jobs=(Job(1, 1, 7),), capacity=5)
        rep, _ = solve_exact(inst)
        assert rep.objective == 7

    def test_two_identical_jobs_share_batch(self):
        inst = Instance(jobs=(Job(1, 2, 9), Job(2, 2, 9)), capacity=5)
        rep, _ = solve_exact(inst)
        assert rep.objective == 9

    def test_zero_time_limit_reports_timeout(self):
        inst = generate_chen(30, (1, 10), (1, 10), 10, seed=5)
        rep, flows = solve_exact(inst, time_limit_s=0.0)
        assert rep.status == "TimeLimit"
        assert rep.objective is None
        assert rep.gap == float("inf")
        assert rep.bound is not None
        assert flows == {}

    def test_node_limit_is_anytime(self):
        inst = generate_chen(40, (1, 15), (1, 10), 10, seed=6)
        rep, flows = solve_exact(inst, node_limit=5)
        assert rep.status in ("Optimal", "Feasible")
        assert rep.objective is not None
        assert rep.bound <= rep.objective
        assert verify_flow(flows, inst)

    def test_matches_oracles_on_sweep(self):
        from batchflow.rng import SplitMix64

        rng = SplitMix64(123)
        for _ in range(80):
            n = rng.randint(2, 8)
            b = 5 if rng.next_u64() % 2 else 10
            inst = generate_chen(n, (1, 20), (1, b), b, seed=rng.next_u64() % 2**32)
            rep, _ = solve_exact(inst)
            assert rep.objective == brute_force(inst)[0] == brute_force_dp(inst)

    def test_tiny_capacities(self):
        from batchflow.rng import SplitMix64

        rng = SplitMix64(124)
        for _ in range(60):
            b = rng.randint(1, 3)
            n = rng.randint(1, 7)
            inst = generate_chen(n, (1, 6), (1, b), b, seed=rng.next_u64() % 2**32)
            rep, flows = solve_exact(inst)
            assert rep.objective == brute_force_dp(inst)
            assert verify_flow(flows, inst)

    def test_full_size_jobs_force_singletons(self):
        inst = Instance(jobs=tuple(Job(i + 1, 5, i + 1) for i in range(6)), capacity=5)
        rep, _ = solve_exact(inst)
        assert rep.objective == 21

    def test_indivisible_size_needs_extra_batch(self):
        # three size-6 jobs in capacity 10: the area bound says two batches,
        # the per-size ceiling in the search bound proves three at the root
        inst = Instance(jobs=tuple(Job(i + 1, 6, 3) for i in range(3)), capacity=10)
        rep, _ = solve_exact(inst)
        assert rep.objective == 9
        assert rep.nodes == 0


class TestLowerBound:
    def test_single_remaining_job(self):
        inst = Instance(jobs=(Job(1, 3, 7),), capacity=5)
        prof = profile(inst)
        assert lower_bound([[1]], prof, 5) == 7

    def test_empty_remainder(self):
        inst = Instance(jobs=(Job(1, 3, 7),), capacity=5)
        prof = profile(inst)
        assert lower_bound([[0]], prof, 5) == 0

    def test_fifteen_jobs_root_equals_optimum(self, fifteen_job_instance):
        # areas per class: 8, 12, 8 over B=5 -> ceilings 2, 4, 6
        prof = profile(fifteen_job_instance)
        rem = [list(row) for row in prof.nt]
        assert lower_bound(rem, prof, 5) == 24

    def test_admissible_on_residuals(self):
        from batchflow.rng import SplitMix64

        rng = SplitMix64(321)
        for _ in range(25):
            n = rng.randint(2, 6)
            inst = generate_chen(n, (1, 12), (1, 5), 5, seed=rng.next_u64() % 2**32)
            prof = profile(inst)
            opt = brute_force_dp(inst)
            rem = [list(row) for row in prof.nt]
            assert lower_bound(rem, prof, 5) <= opt


class TestEnumeratePatterns:
    def test_two_sizes_order_and_content(self):
        inst = Instance(jobs=(Job(1, 2, 4), Job(2, 3, 4)), capacity=5)
        g = reduce_graph(build_graph(profile(inst), 5))
        pats = list(enumerate_patterns(0, [[1], [1]], g))
        assert [p.counts for p in pats] == [(1, 1), (0, 1), (1, 0)]

    def test_class_membership_required(self):
        # size-2 jobs exist only below class 1, so the pure size-2 pattern
        # cannot host a class-1 job
        inst = Instance(jobs=(Job(1, 2, 3), Job(2, 3, 7)), capacity=5)
        g = reduce_graph(build_graph(profile(inst), 5))
        remaining = [[1, 0], [0, 1]]
        pats = [p.counts for p in enumerate_patterns(1, remaining, g)]
        assert (1, 0) not in pats
        assert (1, 1) in pats and (0, 1) in pats

    def test_empty_remainder_yields_nothing(self):
        inst = Instance(jobs=(Job(1, 2, 3),), capacity=5)
        g = reduce_graph(build_graph(profile(inst), 5))
        assert list(enumerate_patterns(0, [[0]], g)) == []

    def test_single_full_size(self):
        inst = Instance(jobs=(Job(1, 5, 3),), capacity=5)
        g = reduce_graph(build_graph(profile(inst), 5))
        assert [p.counts for p in enumerate_patterns(0, [[1]], g)] == [(1,)]

    def test_matches_path_enumeration(self):
        # patterns == compositions reachable as 0->B paths of the reduced
        # graph, filtered by availability and class membership
        inst = Instance(
            jobs=(Job(1, 2, 2), Job(2, 2, 5), Job(3, 3, 5), Job(4, 4, 5)),
            capacity=9,
        )
        prof = profile(inst)
        g = reduce_graph(build_graph(prof, 9))
        remaining = [list(row) for row in prof.nt]
        got = {p.counts for p in enumerate_patterns(1, remaining, g)}

        sizes = prof.sizes
        avail = [sum(remaining[l][:2]) for l in range(len(sizes))]
        out = {}
        for a in g.job_arcs():
            out.setdefault(a.tail, []).append(a.head - a.tail)
        expect = set()

        def walk(node, used):
            if node <= 9 and any(used):
                counts = tuple(used)
                if all(counts[l] <= avail[l] for l in range(len(sizes))) and any(
                    counts[l] and remaining[l][1] for l in range(len(sizes))
                ):
                    expect.add(counts)
            for s in out.get(node, []):
                if node + s <= 9:
                    used[sizes.index(s)] += 1
                    walk(node + s, used)
                    used[sizes.index(s)] -= 1

        walk(0, [0] * len(sizes))
        assert got == expect


class TestVerifyFlow:
    def _fig6_flows(self):
        return {
            0: {
                Arc(0, 2, JOB): 2, Arc(2, 3, JOB): 1, Arc(2, 4, JOB): 1,
                Arc(3, 4, JOB): 1, Arc(4, 5, LOSS): 2, Arc(5, 0, FEEDBACK): 2,
            },
            1: {
                Arc(0, 1, JOB): 1, Arc(0, 3, JOB): 1, Arc(1, 4, JOB): 1,
                Arc(3, 5, JOB): 1, Arc(4, 5, JOB): 1, Arc(5, 0, FEEDBACK): 2,
            },
            2: {
                Arc(0, 2, JOB): 2, Arc(2, 4, JOB): 1, Arc(2, 5, JOB): 1,
                Arc(4, 5, JOB): 1, Arc(5, 0, FEEDBACK): 2,
            },
        }

    def test_reference_flows_pass(self, fifteen_job_instance):
        assert verify_flow(self._fig6_flows(), fifteen_job_instance)

    def test_broken_conservation_fails(self, fifteen_job_instance):
        flows = self._fig6_flows()
        flows[0][Arc(5, 0, FEEDBACK)] = 1
        assert not verify_flow(flows, fifteen_job_instance)

    def test_zero_flows_leave_jobs_unassigned(self, fifteen_job_instance):
        assert not verify_flow({}, fifteen_job_instance)

    def test_bound_violation_fails(self, fifteen_job_instance):
        flows = self._fig6_flows()
        # six batches in structure 1 exceeds the five class-1 jobs
        flows[0][Arc(0, 2, JOB)] = 6
        flows[0][Arc(2, 3, JOB)] = 5
        flows[0][Arc(4, 5, LOSS)] = 6
        flows[0][Arc(3, 4, JOB)] = 5
        flows[0][Arc(5, 0, FEEDBACK)] = 6
        assert not verify_flow(flows, fifteen_job_instance)

    def test_solver_flows_always_verify(self):
        from batchflow.rng import SplitMix64

        rng = SplitMix64(99)
        for _ in range(30):
            inst = generate_chen(
                rng.randint(2, 12), (1, 9), (1, 8), 8, seed=rng.next_u64() % 2**32
            )
            rep, flows = solve_exact(inst)
            assert verify_flow(flows, inst)


class TestAnytime:
    def test_bound_never_exceeds_objective(self):
        inst = generate_chen(60, (1, 20), (1, 10), 10, seed=17)
        for limit in (1, 10, 100, 1000):
            rep, _ = solve_exact(inst, node_limit=limit)
            if rep.objective is not None and rep.bound is not None:
                assert rep.bound <= rep.objective

    def test_incumbent_improves_with_budget(self):
        inst = generate_chen(60, (1, 20), (1, 10), 10, seed=17)
        small, _ = solve_exact(inst, node_limit=1)
        big, _ = solve_exact(inst, node_limit=20000)
        assert big.objective <= small.objective


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(2, 7),
    b=st.sampled_from([5, 8, 10]),
    seed=st.integers(0, 2**32 - 1),
)
def test_solver_equals_subset_dp(n, b, seed):
    inst = generate_chen(n, (1, 20), (1, b), b, seed=seed)
    rep, flows = solve_exact(inst)
    assert rep.status == "Optimal"
    assert rep.objective == brute_force_dp(inst)
    assert verify_flow(flows, inst)
