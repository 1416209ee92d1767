import math

import pytest

from tendongrip.types import FingerType, default_finger, default_hand


@pytest.fixture
def hand():
    return default_hand()


@pytest.fixture
def finger_a():
    return default_finger(FingerType.A)


@pytest.fixture
def zero_rest_a():
    """Finger A with the cord unstretched at q = 0 on both joints."""
    return default_finger(FingerType.A).replace(cord_rest_angles=(0.0, 0.0))


Q1 = (-math.pi / 6, math.pi / 3)
Q2 = (0.0, math.pi / 2)
