"""Benchmark harness: configuration grids, backend runs, CSV tables.

A suite file lists instance configurations; each (configuration, seed,
backend) triple becomes one raw CSV row, and rows aggregate per configuration
with the timeout-at-the-limit mean-time rule, incumbent-only mean makespan,
and infinity rendering for runs without an integer solution.
"""

from __future__ import annotations

import configparser
import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import inf, isinf
from pathlib import Path
from typing import Optional

from . import milp
from .external import solve_external
from .instance import Instance, generate_chen, generate_muter, generate_new
from .solver import STATUS_OPTIMAL, solve_exact

ROW_FIELDS = ["config", "seed", "backend", "status", "time_s", "cmax", "bound", "gap", "nodes"]

BACKENDS = ("builtin", "external:milp1", "external:milp1plus", "external:flow")


@dataclass(frozen=True)
class SuiteConfig:
    name: str
    generator: str  # chen | muter | new
    n_jobs: int
    capacity: int
    seeds: tuple[int, ...]
    time_range: Optional[tuple[int, int]] = None
    size_range: Optional[tuple[int, int]] = None
    time_mode: Optional[str] = None
    size_mode: Optional[str] = None

    def make_instance(self, seed: int) -> Instance:
        if self.generator == "chen":
            return generate_chen(self.n_jobs, self.time_range, self.size_range, self.capacity, seed)
        if self.generator == "muter":
            return generate_muter(self.n_jobs, self.time_range, self.size_range, self.capacity, seed)
        if self.generator == "new":
            return generate_new(self.n_jobs, self.time_mode, self.size_mode, self.capacity, seed)
        raise ValueError(f"unknown generator {self.generator}")


def load_suite(path) -> list[SuiteConfig]:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string(Path(path).read_text(encoding="utf-8"))
    configs = []
    for section in parser.sections():
        sec = parser[section]
        generator = sec.get("generator", "chen").strip()
        n_jobs = sec.getint("n")
        capacity = sec.getint("B")
        if "seeds" in sec:
            seeds = tuple(int(tok) for tok in sec["seeds"].replace(",", " ").split())
        else:
            base = sec.getint("seed_base", 1)
            count = sec.getint("instances", 1)
            seeds = tuple(range(base, base + count))
        kwargs = {}
        if generator == "new":
            kwargs["time_mode"] = sec["p"].strip()
            kwargs["size_mode"] = sec["s"].strip()
        else:
            p = [int(tok) for tok in sec["p"].split()]
            s = [int(tok) for tok in sec["s"].split()]
            kwargs["time_range"] = (p[0], p[1])
            kwargs["size_range"] = (s[0], s[1])
        configs.append(
            SuiteConfig(
                name=section,
                generator=generator,
                n_jobs=n_jobs,
                capacity=capacity,
                seeds=seeds,
                **kwargs,
            )
        )
    return configs


def _run_one(config: SuiteConfig, seed, backend, time_limit_s, node_limit, shim):
    if backend != "builtin" and shim is None:
        return {
            "config": config.name,
            "seed": seed,
            "backend": backend,
            "status": "Skipped",
            "time_s": 0.0,
            "cmax": None,
            "bound": None,
            "gap": None,
            "nodes": None,
        }
    instance = config.make_instance(seed)
    if backend == "builtin":
        report, _ = solve_exact(instance, time_limit_s=time_limit_s, node_limit=node_limit)
    else:
        formulation = backend.split(":", 1)[1]
        model = milp.BUILDERS[formulation](instance)
        report = solve_external(model, shim, time_limit_s)
    return {
        "config": config.name,
        "seed": seed,
        "backend": backend,
        "status": report.status,
        "time_s": report.wall_time_s,
        "cmax": report.objective,
        "bound": report.bound,
        "gap": report.gap,
        "nodes": report.nodes,
    }


def run_suite(
    configs,
    backends,
    time_limit_s=None,
    jobs: int = 1,
    shim: Optional[str] = None,
    node_limit: Optional[int] = None,
):
    """Run every (configuration, seed, backend); returns (rows, aggregates)."""
    for b in backends:
        if b not in BACKENDS:
            raise ValueError(f"unknown backend {b}; choose from {BACKENDS}")
    tasks = [
        (cfg, seed, backend)
        for cfg in configs
        for seed in cfg.seeds
        for backend in backends
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(
                pool.map(
                    _run_one,
                    [t[0] for t in tasks],
                    [t[1] for t in tasks],
                    [t[2] for t in tasks],
                    [time_limit_s] * len(tasks),
                    [node_limit] * len(tasks),
                    [shim] * len(tasks),
                )
            )
    else:
        rows = [_run_one(cfg, seed, b, time_limit_s, node_limit, shim) for cfg, seed, b in tasks]
    return rows, aggregate_rows(rows, time_limit_s)


def aggregate_rows(rows, time_limit_s=None):
    """Per (config, backend) summary with the reporting conventions:
    non-optimal runs count at the time limit, makespan averages only over
    incumbents, and a missing incumbent renders the group gap infinite."""
    groups: dict[tuple[str, str], list[dict]] = {}
    order = []
    for row in rows:
        key = (row["config"], row["backend"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        group = groups[key]
        ran = [r for r in group if r["status"] != "Skipped"]
        skipped = len(group) - len(ran)
        num_opt = sum(1 for r in ran if r["status"] == STATUS_OPTIMAL)
        times = []
        for r in ran:
            if r["status"] == STATUS_OPTIMAL or time_limit_s is None:
                times.append(r["time_s"])
            else:
                times.append(time_limit_s)
        with_inc = [r["cmax"] for r in ran if r["cmax"] is not None]
        gaps = []
        for r in ran:
            g = r["gap"]
            gaps.append(inf if g is None else g)
        out.append(
            {
                "config": key[0],
                "backend": key[1],
                "instances": len(ran),
                "skipped": skipped,
                "num_optimal": num_opt,
                "mean_time_s": sum(times) / len(times) if times else None,
                "mean_cmax": sum(with_inc) / len(with_inc) if with_inc else None,
                "mean_gap": (sum(gaps) / len(gaps)) if gaps else None,
            }
        )
    return out


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        if isinf(value):
            return "inf"
        return f"{value:.6g}"
    return str(value)


def write_rows_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=ROW_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row[k]) for k in ROW_FIELDS})


AGG_FIELDS = [
    "config",
    "backend",
    "instances",
    "skipped",
    "num_optimal",
    "mean_time_s",
    "mean_cmax",
    "mean_gap",
]


def write_aggregate_csv(aggregates, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=AGG_FIELDS)
        writer.writeheader()
        for agg in aggregates:
            row = dict(agg)
            if row["mean_cmax"] is None and row["instances"]:
                row["mean_cmax"] = "No solution"
            writer.writerow({k: _cell(row[k]) if row[k] != "No solution" else row[k] for k in AGG_FIELDS})


def read_rows_csv(path) -> list[dict]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for raw in csv.DictReader(fh):
            row = dict(raw)
            row["seed"] = int(row["seed"]) if row["seed"] else None
            for key in ("time_s", "cmax", "bound", "gap"):
                row[key] = float(row[key]) if row[key] not in ("", None) else None
            row["nodes"] = int(row["nodes"]) if row["nodes"] else None
            rows.append(row)
    return rows


SCALING_FIELDS = [
    "n",
    "generate_s",
    "construct_s",
    "flow_variables",
    "flow_constraints",
    "solve_s",
    "status",
    "cmax",
    "gap",
    "nodes",
]


def scaling_demo(
    n_list,
    time_range=(1, 20),
    size_range=(2, 4),
    capacity=10,
    seed=1,
    time_limit_s=None,
):
    """Model size and timing across n; the two phases are timed separately."""
    rows = []
    for n in n_list:
        t0 = time.perf_counter()
        instance = generate_chen(n, time_range, size_range, capacity, seed)
        t1 = time.perf_counter()
        model = milp.build_flow(instance)
        t2 = time.perf_counter()
        report, _ = solve_exact(instance, time_limit_s=time_limit_s)
        t3 = time.perf_counter()
        stats = model.stats()
        rows.append(
            {
                "n": n,
                "generate_s": t1 - t0,
                "construct_s": t2 - t1,
                "flow_variables": stats["num_variables"],
                "flow_constraints": stats["num_constraints"],
                "solve_s": t3 - t2,
                "status": report.status,
                "cmax": report.objective,
                "gap": report.gap,
                "nodes": report.nodes,
            }
        )
    return rows


def write_scaling_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SCALING_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row[k]) for k in SCALING_FIELDS})
