import numpy as np
import pytest

from hybridcool.presets import diamond_reduced, square_reduced


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def square():
    return square_reduced()


@pytest.fixture
def diamond_weak():
    return diamond_reduced(strong=False)


@pytest.fixture
def diamond_strong():
    return diamond_reduced(strong=True)
