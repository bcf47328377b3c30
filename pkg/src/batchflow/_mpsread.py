"""Minimal free-MPS reader for round-trip checks and the test solver shim.

Not public API.  Understands exactly the subset the writer emits (NAME, ROWS,
COLUMNS with integrality markers, RHS, BOUNDS, ENDATA) plus the common bound
types, with writer defaults: lower bound 0, upper bound +inf.
"""

from __future__ import annotations

import math
from pathlib import Path

from .milp import Constraint, MilpModel, Variable

_REL = {"L": "<=", "E": "=", "G": ">="}


def read_mps(path) -> MilpModel:
    name = "model"
    obj_row = None
    row_rel: dict[str, str] = {}
    row_order: list[str] = []
    col_order: list[str] = []
    col_entries: dict[str, list[tuple[str, float]]] = {}
    integer: dict[str, bool] = {}
    rhs: dict[str, float] = {}
    lb: dict[str, float] = {}
    ub: dict[str, float] = {}
    section = None
    in_int = False

    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        fields = raw.split()
        # section headers start in column one; data lines are indented
        if not raw[0].isspace():
            upper = fields[0].upper()
            if upper in ("ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"):
                section = upper
            elif upper == "NAME":
                name = fields[1] if len(fields) > 1 else name
            continue
        if section == "ROWS":
            kind, row = fields[0].upper(), fields[1]
            if kind == "N":
                if obj_row is None:
                    obj_row = row
            else:
                row_rel[row] = _REL[kind]
                row_order.append(row)
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1] == "'MARKER'":
                in_int = fields[2] == "'INTORG'"
                continue
            col = fields[0]
            if col not in col_entries:
                col_entries[col] = []
                col_order.append(col)
                integer[col] = in_int
            for i in range(1, len(fields) - 1, 2):
                col_entries[col].append((fields[i], float(fields[i + 1])))
        elif section == "RHS":
            for i in range(1, len(fields) - 1, 2):
                rhs[fields[i]] = float(fields[i + 1])
        elif section == "BOUNDS":
            btype, col = fields[0].upper(), fields[2]
            val = float(fields[3]) if len(fields) > 3 else 0.0
            if btype in ("LO", "LI", "MI"):
                lb[col] = -math.inf if btype == "MI" else val
            elif btype in ("UP", "UI", "PL"):
                ub[col] = math.inf if btype == "PL" else val
            elif btype == "FX":
                lb[col] = ub[col] = val
            elif btype == "FR":
                lb[col], ub[col] = -math.inf, math.inf
            elif btype == "BV":
                lb[col], ub[col] = 0.0, 1.0
                integer[col] = True

    variables = []
    for col in col_order:
        obj = 0.0
        for row, coeff in col_entries[col]:
            if row == obj_row:
                obj += coeff
        variables.append(
            Variable(
                name=col,
                lb=lb.get(col, 0.0),
                ub=ub.get(col, math.inf),
                integer=integer[col],
                obj=obj,
            )
        )

    per_row: dict[str, list[tuple[str, float]]] = {r: [] for r in row_order}
    for col in col_order:
        for row, coeff in col_entries[col]:
            if row != obj_row:
                per_row[row].append((col, coeff))
    constraints = [
        Constraint(name=r, coeffs=tuple(per_row[r]), relation=row_rel[r], rhs=rhs.get(r, 0.0))
        for r in row_order
    ]
    return MilpModel(name=name, variables=variables, constraints=constraints)
