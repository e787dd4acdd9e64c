import numpy as np
import pytest

from sps.fault_analysis import partition
from sps.problem_builder import build


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def build_for(scenario):
    """Partition + problem instance for a scenario (shared helper)."""
    part = partition(scenario.topology, scenario.faults, scenario)
    return part, build(scenario, part)
