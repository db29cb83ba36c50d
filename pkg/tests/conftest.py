import numpy as np
import pytest


def rand_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def rand_hermitian(rng, n, lo=1.0, hi=4.0):
    """Random hermitian with eigenvalues uniform in [lo, hi]."""
    q = np.linalg.qr(rand_complex(rng, n))[0]
    return q @ np.diag(rng.uniform(lo, hi, n)) @ q.conj().T


def rand_sectorial(rng, n, angle=0.3, lo=0.5, hi=3.0):
    """Hermitian-dominant matrix with numerical range in a thin wedge."""
    h = rand_hermitian(rng, n, lo, hi)
    k = rand_complex(rng, n)
    k = (k + k.conj().T) / 2
    k *= angle * lo / max(np.linalg.norm(k, 2), 1e-30)
    return h + 1j * k


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
