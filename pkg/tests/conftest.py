import sys

import numpy as np
import pytest

sys.set_int_max_str_digits(2_000_000)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))
