import pathlib

import numpy as np
import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bell_amplitudes():
    """(|11> + |22>)/sqrt(2) on 2x2 in flat basis order."""
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1.0 / np.sqrt(2.0)
    return v


def brute_density(weights, vectors):
    """Independent oracle: term-by-term sum of weighted projectors."""
    out = np.zeros((vectors.shape[0], vectors.shape[0]), dtype=complex)
    for w, col in zip(weights, vectors.T):
        out += w * np.outer(col, col.conj())
    return out


def brute_partial_transpose(mat, m, n):
    """Independent oracle: transpose over factor B by index shuffling."""
    out = np.zeros_like(mat)
    for i in range(m):
        for j in range(m):
            for a in range(n):
                for b in range(n):
                    out[i * n + a, j * n + b] = mat[i * n + b, j * n + a]
    return out


def svd_rank(mat, rel=1e-10):
    """Independent oracle: singular values above rel * sigma_max."""
    s = np.linalg.svd(np.asarray(mat, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel * s[0]))
