import math

import numpy as np
import pytest
from hypothesis import strategies as st

from remote_prep.protocol import ChannelPair, TargetState, random_channel, random_target

EPR = ChannelPair.epr()
PARTIAL = ChannelPair(0.6, 0.8, 0.6, 0.8)
UNIFORM_TARGET = TargetState(0.5, 0.5, 0.5, 0.5)


@st.composite
def targets(draw):
    x = np.array(draw(st.lists(st.floats(-1, 1), min_size=4, max_size=4)))
    norm = np.linalg.norm(x)
    if norm < 1e-3:
        x, norm = np.array([1.0, 0, 0, 0]), 1.0
    x = x / norm
    phase = np.exp(1j * draw(st.floats(0, 2 * math.pi)))
    return TargetState(float(x[0]), complex(x[1] * phase), float(x[2]), complex(x[3] * phase))


@st.composite
def channels(draw):
    t1 = draw(st.floats(-math.pi / 4, math.pi / 4))
    t2 = draw(st.floats(-math.pi / 4, math.pi / 4))
    return ChannelPair(math.sin(t1), math.cos(t1), math.sin(t2), math.cos(t2))


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def random_targets(rng):
    return [random_target(rng) for _ in range(100)]


@pytest.fixture
def random_channels(rng):
    return [random_channel(rng) for _ in range(100)]
