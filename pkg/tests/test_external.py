import sys

import pytest

from conftest import SHIM_CMD, has_scipy
from batchflow.external import run_shim, solve_external
from batchflow.milp import MilpModel, build_flow, build_milp1, build_milp1_plus, lp_relaxation
from batchflow.mps import write_mps

requires_scipy = pytest.mark.skipif(not has_scipy(), reason="scipy backend missing")


def infeasible_model():
    m = MilpModel(name="infeasible-toy")
    m.add_var("x", 0, 0, integer=False, obj=1)
    m.add_con("force", [("x", 1)], ">=", 1)
    return m


@requires_scipy
class TestScipyShim:
    def test_four_jobs_milp1_optimal(self, four_job_instance):
        report = solve_external(build_milp1(four_job_instance), SHIM_CMD, 60)
        assert report.status == "Optimal"
        assert report.objective == pytest.approx(12)
        assert report.gap == pytest.approx(0, abs=1e-6)

    def test_four_jobs_milp1plus_optimal(self, four_job_instance):
        report = solve_external(build_milp1_plus(four_job_instance), SHIM_CMD, 60)
        assert report.status == "Optimal"
        assert report.objective == pytest.approx(12)

    def test_fifteen_jobs_flow_optimal(self, fifteen_job_instance):
        report = solve_external(build_flow(fifteen_job_instance), SHIM_CMD, 60)
        assert report.status == "Optimal"
        assert report.objective == pytest.approx(24)

    def test_infeasible_toy(self):
        report = solve_external(infeasible_model(), SHIM_CMD, 60)
        assert report.status == "Infeasible"
        assert report.objective is None
        assert report.gap == float("inf")

    def test_relaxation_below_integer_optimum(self, four_job_instance):
        model = build_milp1_plus(four_job_instance)
        relaxed = solve_external(lp_relaxation(model), SHIM_CMD, 60)
        assert relaxed.status == "Optimal"
        assert relaxed.objective <= 12 + 1e-9

    def test_run_shim_on_file(self, tmp_path, four_job_instance):
        path = tmp_path / "m.mps"
        write_mps(build_milp1(four_job_instance), path)
        report = run_shim(path, SHIM_CMD, 60)
        assert report.status == "Optimal"
        assert report.objective == pytest.approx(12)


@requires_scipy
def test_relaxation_comparison_recorded(capsys):
    # relax(flow) vs relax(milp1) on a small sample: recorded, not asserted
    from batchflow.instance import generate_chen

    gaps = []
    for seed in range(3):
        inst = generate_chen(8, (1, 10), (1, 5), 5, seed=seed)
        flow_lp = solve_external(lp_relaxation(build_flow(inst)), SHIM_CMD, 60)
        milp1_lp = solve_external(lp_relaxation(build_milp1(inst)), SHIM_CMD, 60)
        assert flow_lp.status == "Optimal"
        assert milp1_lp.status == "Optimal"
        gaps.append(flow_lp.objective - milp1_lp.objective)
    with capsys.disabled():
        print(f"\n[recorded] relax(flow) - relax(milp1) on sample: {gaps}")


class TestAdapterContract:
    def write_fake_shim(self, tmp_path, body, code):
        shim = tmp_path / "fake_shim.py"
        shim.write_text(
            "import sys\n"
            "out = sys.argv[3]\n"
            f"open(out, 'w').write({body!r})\n"
            f"sys.exit({code})\n"
        )
        return f"{sys.executable} {shim}"

    def test_exit_zero_is_optimal(self, tmp_path, four_job_instance):
        cmd = self.write_fake_shim(tmp_path, "C_1 5\nC_2 7\n", 0)
        report = solve_external(build_milp1(four_job_instance), cmd, 5)
        assert report.status == "Optimal"
        assert report.objective == pytest.approx(12)
        assert report.bound == pytest.approx(12)

    def test_exit_one_with_bound(self, tmp_path, four_job_instance):
        cmd = self.write_fake_shim(tmp_path, "C_1 15\n=bound= 11\n", 1)
        report = solve_external(build_milp1(four_job_instance), cmd, 5)
        assert report.status == "Feasible"
        assert report.objective == pytest.approx(15)
        assert report.bound == pytest.approx(11)
        assert report.gap == pytest.approx((15 - 11) / 15)

    def test_exit_one_timelimit_hint(self, tmp_path, four_job_instance):
        cmd = self.write_fake_shim(tmp_path, "C_1 15\n=status= timelimit\n", 1)
        report = solve_external(build_milp1(four_job_instance), cmd, 5)
        assert report.status == "TimeLimit"

    def test_exit_two_infeasible_hint(self, tmp_path, four_job_instance):
        cmd = self.write_fake_shim(tmp_path, "=status= infeasible\n", 2)
        report = solve_external(build_milp1(four_job_instance), cmd, 5)
        assert report.status == "Infeasible"

    def test_exit_two_without_hint_is_error(self, tmp_path, four_job_instance):
        cmd = self.write_fake_shim(tmp_path, "", 2)
        report = solve_external(build_milp1(four_job_instance), cmd, 5)
        assert report.status == "Error"

    def test_crashing_shim_is_error(self, tmp_path, four_job_instance):
        shim = tmp_path / "crash.py"
        shim.write_text("raise RuntimeError('boom')\n")
        report = solve_external(build_milp1(four_job_instance), f"{sys.executable} {shim}", 5)
        assert report.status == "Error"

    def test_hanging_shim_hits_wall_cap(self, tmp_path, four_job_instance):
        shim = tmp_path / "hang.py"
        shim.write_text("import time\ntime.sleep(3600)\n")
        report = solve_external(
            build_milp1(four_job_instance),
            f"{sys.executable} {shim}",
            0.01,
            wall_cap_s=1.0,
        )
        assert report.status == "TimeLimit"
        assert report.objective is None
