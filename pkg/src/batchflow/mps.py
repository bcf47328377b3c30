"""Deterministic LP and free-MPS writers.

Output is a pure function of the model: iteration follows declaration order,
numbers are formatted with a single rule, and names are restricted to
[A-Za-z0-9_] of at most 255 characters.  The LP dialect is the common
CPLEX-style subset; MPS is the canonical exchange format.
"""

from __future__ import annotations

import re
from pathlib import Path

from .milp import EQ, GE, LE, MilpModel

_NAME_RE = re.compile(r"^[A-Za-z0-9_]{1,255}$")


def _num(x) -> str:
    f = float(x)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def sanitize_name(name: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9_]", "_", name)[:255]
    return cleaned or "_"


def _check_names(model: MilpModel) -> None:
    for v in model.variables:
        if not _NAME_RE.match(v.name):
            raise ValueError(f"variable name {v.name!r} not serializable")
    for c in model.constraints:
        if not _NAME_RE.match(c.name):
            raise ValueError(f"constraint name {c.name!r} not serializable")


def _terms(coeffs) -> str:
    parts = []
    for i, (name, coeff) in enumerate(coeffs):
        if i == 0:
            if coeff < 0:
                parts.append(f"- {_num(-coeff)} {name}")
            else:
                parts.append(f"{_num(coeff)} {name}")
        elif coeff < 0:
            parts.append(f"- {_num(-coeff)} {name}")
        else:
            parts.append(f"+ {_num(coeff)} {name}")
    return " ".join(parts)


def lp_string(model: MilpModel) -> str:
    _check_names(model)
    lines = [f"\\ model: {sanitize_name(model.name)}", "Minimize"]
    obj = [(v.name, v.obj) for v in model.variables if v.obj != 0]
    lines.append(" obj: " + (_terms(obj) if obj else "0 " + model.variables[0].name))
    lines.append("Subject To")
    rel_out = {LE: "<=", EQ: "=", GE: ">="}
    for c in model.constraints:
        body = _terms(c.coeffs) if c.coeffs else "0 " + model.variables[0].name
        lines.append(f" {c.name}: {body} {rel_out[c.relation]} {_num(c.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        lines.append(f" {_num(v.lb)} <= {v.name} <= {_num(v.ub)}")
    integers = [v.name for v in model.variables if v.integer]
    if integers:
        lines.append("Generals")
        for name in integers:
            lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def mps_string(model: MilpModel) -> str:
    _check_names(model)
    row_type = {LE: "L", EQ: "E", GE: "G"}
    lines = [f"NAME {sanitize_name(model.name)}", "ROWS", " N OBJ"]
    for c in model.constraints:
        lines.append(f" {row_type[c.relation]} {c.name}")

    # Column-major entries in declaration order, obj coefficient first.
    entries: dict[str, list[tuple[str, float]]] = {v.name: [] for v in model.variables}
    for v in model.variables:
        if v.obj != 0:
            entries[v.name].append(("OBJ", v.obj))
    for c in model.constraints:
        for name, coeff in c.coeffs:
            entries[name].append((c.name, coeff))

    lines.append("COLUMNS")
    marker = 0
    in_int = False
    for v in model.variables:
        if v.integer != in_int:
            kind = "'INTORG'" if v.integer else "'INTEND'"
            lines.append(f" M{marker} 'MARKER' {kind}")
            marker += 1
            in_int = v.integer
        cols = entries[v.name] or [("OBJ", 0)]
        for row, coeff in cols:
            lines.append(f" {v.name} {row} {_num(coeff)}")
    if in_int:
        lines.append(f" M{marker} 'MARKER' 'INTEND'")

    lines.append("RHS")
    for c in model.constraints:
        if c.rhs != 0:
            lines.append(f" RHS {c.name} {_num(c.rhs)}")

    lines.append("BOUNDS")
    for v in model.variables:
        lo, up = ("LI", "UI") if v.integer else ("LO", "UP")
        lines.append(f" {lo} BND {v.name} {_num(v.lb)}")
        lines.append(f" {up} BND {v.name} {_num(v.ub)}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def write_lp(model: MilpModel, path) -> None:
    Path(path).write_text(lp_string(model), encoding="utf-8")


def write_mps(model: MilpModel, path) -> None:
    Path(path).write_text(mps_string(model), encoding="utf-8")
