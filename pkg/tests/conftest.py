import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)


def kron_chain(mats):
    """Dense Kronecker product of a list of small matrices or vectors."""
    out = np.array([1.0 + 0.0j])
    if mats and np.asarray(mats[0]).ndim == 2:
        out = np.array([[1.0 + 0.0j]])
    for m in mats:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out
