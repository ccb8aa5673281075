import math

import numpy as np
import pytest

from tanksim.gmproc import GroundMotion
from tanksim.model import bundled_spec


@pytest.fixture(scope="session")
def slender():
    return bundled_spec("slender")


@pytest.fixture(scope="session")
def broad():
    return bundled_spec("broad")


def make_sine(freq: float, amp: float, duration: float,
              dt: float) -> GroundMotion:
    t = dt * np.arange(int(round(duration / dt)) + 1)
    return GroundMotion(dt=dt, accel=amp * np.sin(2.0 * math.pi * freq * t),
                        name=f"sine_{freq:g}hz")
