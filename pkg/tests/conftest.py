import numpy as np
import pytest

from opinion_campaign.equilibrium import SolverConfig
from opinion_campaign.generate import cycle_graph, path_graph, star_graph


@pytest.fixture
def path2():
    return path_graph(2), np.array([0.0, 1.0])


@pytest.fixture
def c6():
    return cycle_graph(6), np.zeros(6)


@pytest.fixture
def star3():
    return star_graph(3)


@pytest.fixture
def exact_cfg():
    return SolverConfig(method="exact")
