from math import inf

import pytest

from batchflow.bench import (
    ROW_FIELDS,
    SuiteConfig,
    aggregate_rows,
    load_suite,
    read_rows_csv,
    run_suite,
    scaling_demo,
    write_rows_csv,
    write_scaling_csv,
)

MINI_SUITE = """\
# four small configurations
[c1-chen-n10-p1s1]
generator = chen
n = 10
p = 1 10
s = 1 10
B = 10
instances = 3
seed_base = 100

[c2-chen-n20-p1s2]
generator = chen
n = 20
p = 1 10
s = 2 4
B = 10
instances = 3
seed_base = 200

[c3-muter-n15-p3s3]
generator = muter
n = 15
p = 1 100
s = 4 8
B = 10
seeds = 7, 8, 9

[c4-new-n20-p1s3]
generator = new
n = 20
p = p1
s = s3
B = 20
instances = 3
seed_base = 400
"""


@pytest.fixture
def mini_suite(tmp_path):
    path = tmp_path / "suite.txt"
    path.write_text(MINI_SUITE)
    return load_suite(path)


class TestSuiteFile:
    def test_parses_all_sections(self, mini_suite):
        assert [c.name for c in mini_suite] == [
            "c1-chen-n10-p1s1",
            "c2-chen-n20-p1s2",
            "c3-muter-n15-p3s3",
            "c4-new-n20-p1s3",
        ]
        assert mini_suite[2].seeds == (7, 8, 9)
        assert mini_suite[3].time_mode == "p1"

    def test_instances_regenerate_bit_exactly(self, mini_suite):
        cfg = mini_suite[0]
        assert cfg.make_instance(100) == cfg.make_instance(100)


class TestRunSuite:
    def test_builtin_rows_and_aggregates(self, mini_suite):
        rows, aggs = run_suite(mini_suite, ["builtin"], time_limit_s=60)
        assert len(rows) == 12
        assert all(set(ROW_FIELDS) == set(r) for r in rows)
        assert all(r["status"] == "Optimal" for r in rows)
        by_cfg = {a["config"]: a for a in aggs}
        assert by_cfg["c1-chen-n10-p1s1"]["num_optimal"] == 3
        assert all(a["mean_gap"] == 0 for a in aggs)

    def test_deterministic_objectives(self, mini_suite):
        rows1, _ = run_suite(mini_suite[:2], ["builtin"], time_limit_s=60)
        rows2, _ = run_suite(mini_suite[:2], ["builtin"], time_limit_s=60)
        assert [r["cmax"] for r in rows1] == [r["cmax"] for r in rows2]
        assert [r["status"] for r in rows1] == [r["status"] for r in rows2]

    def test_external_without_shim_is_skipped(self, mini_suite):
        rows, aggs = run_suite(mini_suite[:1], ["builtin", "external:flow"], 60)
        skipped = [r for r in rows if r["backend"] == "external:flow"]
        assert skipped and all(r["status"] == "Skipped" for r in skipped)
        agg = next(a for a in aggs if a["backend"] == "external:flow")
        assert agg["skipped"] == 3 and agg["instances"] == 0

    def test_unknown_backend_rejected(self, mini_suite):
        with pytest.raises(ValueError):
            run_suite(mini_suite, ["cplex"], 60)

    def test_external_backend_through_shim(self, mini_suite):
        from conftest import SHIM_CMD, has_scipy

        if not has_scipy():
            pytest.skip("scipy backend missing")
        rows, _ = run_suite(
            mini_suite[:1], ["builtin", "external:flow"], 120, shim=SHIM_CMD
        )
        by_backend = {}
        for r in rows:
            by_backend.setdefault(r["backend"], []).append(r)
        builtin = sorted(r["cmax"] for r in by_backend["builtin"])
        external = sorted(round(r["cmax"]) for r in by_backend["external:flow"])
        assert builtin == external
        assert all(r["status"] == "Optimal" for r in rows)

    def test_builtin_rows_match_oracle(self, mini_suite):
        from batchflow.oracle import brute_force

        cfg = mini_suite[0]  # n=10, within the oracle cap
        rows, _ = run_suite([cfg], ["builtin"], 60)
        for row in rows:
            inst = cfg.make_instance(row["seed"])
            assert row["cmax"] == brute_force(inst)[0]

    def test_zero_limit_rows_time_out(self, mini_suite):
        rows, aggs = run_suite(mini_suite[:1], ["builtin"], time_limit_s=0.0)
        assert all(r["status"] == "TimeLimit" for r in rows)
        agg = aggs[0]
        assert agg["mean_time_s"] == 0.0  # timeouts counted at the limit
        assert agg["mean_cmax"] is None  # rendered as "No solution"
        assert agg["mean_gap"] == inf

    def test_parallel_matches_serial(self, mini_suite):
        serial, _ = run_suite(mini_suite[:2], ["builtin"], 60, jobs=1)
        parallel, _ = run_suite(mini_suite[:2], ["builtin"], 60, jobs=2)
        key = lambda r: (r["config"], r["seed"], r["backend"])
        assert sorted((r["cmax"], r["status"]) for r in serial) == sorted(
            (r["cmax"], r["status"]) for r in parallel
        )
        assert sorted(map(key, serial)) == sorted(map(key, parallel))


class TestAggregation:
    def test_hand_computed_aggregation(self):
        rows = [
            {"config": "c", "seed": 1, "backend": "builtin", "status": "Optimal",
             "time_s": 2.0, "cmax": 10, "bound": 10, "gap": 0.0, "nodes": 5},
            {"config": "c", "seed": 2, "backend": "builtin", "status": "TimeLimit",
             "time_s": 29.7, "cmax": 20, "bound": 15, "gap": 0.25, "nodes": 9},
            {"config": "c", "seed": 3, "backend": "builtin", "status": "TimeLimit",
             "time_s": 29.9, "cmax": None, "bound": 12, "gap": inf, "nodes": 9},
        ]
        agg = aggregate_rows(rows, time_limit_s=30.0)[0]
        assert agg["num_optimal"] == 1
        assert agg["mean_time_s"] == pytest.approx((2.0 + 30.0 + 30.0) / 3)
        assert agg["mean_cmax"] == pytest.approx(15.0)  # incumbents only
        assert agg["mean_gap"] == inf

    def test_no_limit_uses_measured_times(self):
        rows = [
            {"config": "c", "seed": 1, "backend": "b", "status": "Feasible",
             "time_s": 4.0, "cmax": 9, "bound": 8, "gap": 0.1, "nodes": 2},
        ]
        agg = aggregate_rows(rows, time_limit_s=None)[0]
        assert agg["mean_time_s"] == 4.0


class TestCsv:
    def test_round_trip_rows(self, tmp_path, mini_suite):
        rows, _ = run_suite(mini_suite[:1], ["builtin"], 60)
        path = tmp_path / "rows.csv"
        write_rows_csv(rows, path)
        header = path.read_text().splitlines()[0]
        assert header == "config,seed,backend,status,time_s,cmax,bound,gap,nodes"
        back = read_rows_csv(path)
        assert [r["cmax"] for r in back] == [float(r["cmax"]) for r in rows]
        assert [r["seed"] for r in back] == [r["seed"] for r in rows]

    def test_inf_gap_serialized(self, tmp_path):
        rows = [
            {"config": "c", "seed": 1, "backend": "b", "status": "TimeLimit",
             "time_s": 1.0, "cmax": None, "bound": None, "gap": inf, "nodes": None},
        ]
        path = tmp_path / "rows.csv"
        write_rows_csv(rows, path)
        back = read_rows_csv(path)
        assert back[0]["gap"] == inf
        assert back[0]["cmax"] is None


class TestScalingDemo:
    def test_model_size_constant_in_n(self, tmp_path):
        rows = scaling_demo([1_000, 10_000], time_limit_s=30)
        assert rows[0]["flow_variables"] == rows[1]["flow_variables"]
        assert rows[0]["flow_constraints"] == rows[1]["flow_constraints"]
        assert all(r["status"] in ("Optimal", "TimeLimit") for r in rows)
        path = tmp_path / "scaling.csv"
        write_scaling_csv(rows, path)
        assert path.read_text().startswith("n,generate_s,construct_s")
