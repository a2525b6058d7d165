import numpy as np
import pytest

from eivslope.dataset import Dataset


def dataset_with_moments(
    n: int, r: float, l: float, mean1: float = 0.0, mean2: float = 0.0, seed: int = 0
) -> Dataset:
    """A dataset whose sample moments (divisor n - 1) are exactly s11 = 1,
    s22 = l² and s12 = r l, up to rounding."""
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(n, 2))
    raw -= raw.mean(axis=0)
    current = np.linalg.cholesky(np.cov(raw, rowvar=False))
    target = np.linalg.cholesky(np.array([[1.0, r * l], [r * l, l * l]]))
    points = raw @ np.linalg.inv(current).T @ target.T
    return Dataset(y1=points[:, 0] + mean1, y2=points[:, 1] + mean2)


@pytest.fixture
def zellner_data() -> Dataset:
    """20 pairs with r = 0.909 and l = 0.963."""
    return dataset_with_moments(20, 0.909, 0.963, mean1=10.0, mean2=9.5)
