import sys
from pathlib import Path

import pytest

from batchflow.instance import Instance, Job

SHIM_CMD = f"{sys.executable} {Path(__file__).parent / 'shims' / 'milp_shim.py'}"


def has_scipy() -> bool:
    try:
        import scipy.optimize  # noqa: F401

        return True
    except ImportError:
        return False


@pytest.fixture
def four_job_instance():
    # B=8; splitting into three batches beats the two-batch packing (12 < 15)
    return Instance(
        jobs=(Job(1, 2, 7), Job(2, 6, 1), Job(3, 4, 8), Job(4, 4, 3)),
        capacity=8,
        name="four-jobs",
    )


@pytest.fixture
def fifteen_job_instance():
    # optimum 24 with two batches per distinct time (3, 4, 5), B=5
    rows = [
        (1, 2, 3), (2, 1, 3), (3, 2, 3), (4, 1, 3), (5, 2, 3),
        (6, 3, 4), (7, 2, 4), (8, 1, 4), (9, 1, 4), (10, 2, 4),
        (11, 3, 4), (12, 3, 5), (13, 1, 5), (14, 2, 5), (15, 2, 5),
    ]
    return Instance(
        jobs=tuple(Job(*row) for row in rows), capacity=5, name="fifteen-jobs"
    )


@pytest.fixture
def five_sizes_instance():
    # sizes (3, 2, 2, 1, 1) with one shared time; the classic decomposition
    return Instance(
        jobs=(Job(1, 3, 1), Job(2, 2, 1), Job(3, 2, 1), Job(4, 1, 1), Job(5, 1, 1)),
        capacity=5,
        name="five-sizes",
    )
