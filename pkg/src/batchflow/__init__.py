"""Exact optimization toolkit for single batch-processing-machine scheduling.

Jobs with integer sizes and processing times are grouped into capacity-B
batches on one machine; a batch runs for its longest member's time and the
makespan (total time) is minimized.  The toolkit builds the arc-flow graph
whose size depends only on distinct sizes/times and B, compiles three MILP
formulations, solves exactly with a built-in pattern branch-and-bound,
decodes flows into verifiable schedules, and reproduces the benchmark
protocol at desk scale.
"""

from .instance import (
    ClassProfile,
    Instance,
    Job,
    generate_chen,
    generate_muter,
    generate_new,
    profile,
    read_instance,
    validate,
    write_instance,
)
from .graph import (
    Arc,
    ArcBounds,
    ArcFlowGraph,
    FEEDBACK,
    JOB,
    LOSS,
    bounds,
    build_graph,
    dump_arcs,
    expected_arc_count,
    reduce_graph,
    size_report,
    to_dot,
)
from .milp import (
    BUILDERS,
    Constraint,
    MilpModel,
    Variable,
    build_flow,
    build_milp1,
    build_milp1_plus,
    lp_relaxation,
)
from .mps import lp_string, mps_string, write_lp, write_mps
from .external import run_shim, solve_external
from .solver import (
    BatchPattern,
    SolveReport,
    batches_to_flows,
    enumerate_patterns,
    lower_bound,
    solve_exact,
    verify_flow,
)
from .decode import (
    Batch,
    Schedule,
    decode,
    encode_schedule,
    makespan,
    read_schedule,
    validate_schedule,
    write_schedule,
)
from .oracle import brute_force, brute_force_dp
from .bench import (
    SuiteConfig,
    aggregate_rows,
    load_suite,
    run_suite,
    scaling_demo,
    write_aggregate_csv,
    write_rows_csv,
    write_scaling_csv,
)

__version__ = "0.1.0"
