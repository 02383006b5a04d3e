import numpy as np
import pytest

from graph_locate.datasets import l_shaped_plan, symmetric_plan
from graph_locate.floorplan import build_agraph
from graph_locate.frames import FrameTransform


@pytest.fixture
def l_shaped_agraph():
    return build_agraph(l_shaped_plan())


@pytest.fixture
def symmetric_agraph():
    return build_agraph(symmetric_plan())


@pytest.fixture
def sample_transform():
    return FrameTransform(np.array([5.0, -2.0]), 0.7)


def random_unit_xy(rng):
    angle = rng.uniform(-np.pi, np.pi)
    return np.array([np.cos(angle), np.sin(angle), 0.0])
