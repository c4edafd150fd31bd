import numpy as np
import pytest

from betlab import kernels


@pytest.fixture(params=kernels.available_backends())
def kern(request):
    """Run a test once per kernel lane."""
    return kernels.get_backend(request.param)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)


def binary_paths(length: int) -> np.ndarray:
    """All binary paths of the given length, shape (2^length, length), float64."""
    n = 1 << length
    bits = (np.arange(n)[:, None] >> np.arange(length)[None, :]) & 1
    return bits.astype(float)
