"""Subprocess adapter for any MPS-reading MILP solver behind a shim script.

Shim contract: ``shim <mps-path> <timelimit-s> <out-path>``, exit code 0 for
proven optimal, 1 for feasible-not-proven, 2 for anything else.  The solution
file holds one ``<name> <value>`` line per variable; optional special lines
``=obj= <v>``, ``=bound= <v>`` and ``=status= <optimal|feasible|timelimit|
infeasible|error>`` refine the report.  The objective is recomputed from the
variable values whenever any are present.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
import time
from pathlib import Path
from typing import Optional

from .milp import MilpModel
from .mps import write_mps
from .solver import (
    STATUS_ERROR,
    STATUS_FEASIBLE,
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    STATUS_TIMELIMIT,
    SolveReport,
    compute_gap,
)


def _parse_solution(path: Path) -> tuple[dict[str, float], dict[str, str]]:
    values: dict[str, float] = {}
    specials: dict[str, str] = {}
    if not path.exists():
        return values, specials
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) < 2:
            continue
        if fields[0].startswith("=") and fields[0].endswith("="):
            specials[fields[0].strip("=")] = fields[1]
        else:
            try:
                values[fields[0]] = float(fields[1])
            except ValueError:
                continue
    return values, specials


def solve_external(
    model: MilpModel,
    solver_command: str,
    time_limit_s: Optional[float] = None,
    wall_cap_s: Optional[float] = None,
) -> SolveReport:
    """Write the model as free MPS, run the shim, parse the report."""
    with tempfile.TemporaryDirectory(prefix="batchflow-ext-") as tmp:
        mps_path = Path(tmp) / "model.mps"
        write_mps(model, mps_path)
        return run_shim(
            mps_path,
            solver_command,
            time_limit_s,
            objective_of=model.objective_value,
            wall_cap_s=wall_cap_s,
        )


def run_shim(
    mps_path,
    solver_command: str,
    time_limit_s: Optional[float] = None,
    objective_of=None,
    wall_cap_s: Optional[float] = None,
) -> SolveReport:
    """Drive the shim on an existing MPS file.

    ``objective_of(values)`` recomputes the objective; when absent it is
    read from the file's objective row.  ``wall_cap_s`` kills shims that
    ignore their own limit (defaults to twice the limit plus slack).
    """
    mps_path = Path(mps_path)
    if objective_of is None:
        coeffs = _objective_coeffs(mps_path)
        objective_of = lambda values: sum(
            c * values.get(name, 0.0) for name, c in coeffs.items()
        )
    start = time.monotonic()
    limit = time_limit_s if time_limit_s is not None else 0
    with tempfile.TemporaryDirectory(prefix="batchflow-sol-") as tmp:
        out_path = Path(tmp) / "solution.txt"
        cmd = shlex.split(solver_command) + [str(mps_path), str(limit), str(out_path)]
        wall_cap = wall_cap_s
        if wall_cap is None and time_limit_s is not None:
            wall_cap = max(2 * time_limit_s + 30, 60)
        try:
            proc = subprocess.run(
                cmd,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                timeout=wall_cap,
            )
            code = proc.returncode
        except subprocess.TimeoutExpired:
            return SolveReport(
                status=STATUS_TIMELIMIT,
                objective=None,
                bound=None,
                gap=compute_gap(None, None),
                nodes=None,
                wall_time_s=time.monotonic() - start,
            )
        except OSError:
            code = -1
        values, specials = _parse_solution(out_path)

    elapsed = time.monotonic() - start
    objective = objective_of(values) if values else None
    if objective is None and "obj" in specials:
        objective = float(specials["obj"])
    bound = float(specials["bound"]) if "bound" in specials else None
    hinted = specials.get("status", "").lower()
    nodes = int(float(specials["nodes"])) if "nodes" in specials else None

    if code == 0:
        status = STATUS_OPTIMAL
        if bound is None:
            bound = objective
    elif code == 1:
        # a feasible claim must come with an incumbent in the solution file
        if objective is None:
            status = STATUS_ERROR
        else:
            status = STATUS_TIMELIMIT if hinted == "timelimit" else STATUS_FEASIBLE
    elif code == 2:
        if hinted == "infeasible":
            status = STATUS_INFEASIBLE
            objective = None
        elif hinted == "timelimit":
            status = STATUS_TIMELIMIT
        else:
            status = STATUS_ERROR
    else:
        status = STATUS_ERROR
    return SolveReport(
        status=status,
        objective=objective,
        bound=bound,
        gap=compute_gap(objective, bound),
        nodes=nodes,
        wall_time_s=elapsed,
    )


def _objective_coeffs(mps_path: Path) -> dict[str, float]:
    # minimal scan of the COLUMNS section for objective-row entries
    obj_row = None
    coeffs: dict[str, float] = {}
    section = None
    for raw in mps_path.read_text(encoding="utf-8").splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        fields = raw.split()
        if not raw[0].isspace():
            key = fields[0].upper()
            if key in ("ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"):
                section = key
            continue
        if section == "ROWS" and fields[0].upper() == "N" and obj_row is None:
            obj_row = fields[1]
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1] == "'MARKER'":
                continue
            for i in range(1, len(fields) - 1, 2):
                if fields[i] == obj_row:
                    coeffs[fields[0]] = coeffs.get(fields[0], 0.0) + float(fields[i + 1])
    return coeffs
