import numpy as np
from hypothesis import strategies as st

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=6)


def rng(seed):
    return np.random.default_rng(seed)


def cmat(seed, n, m=None):
    r = rng(seed)
    return r.normal(size=(n, m or n)) + 1j * r.normal(size=(n, m or n))


def herm(seed, n):
    G = cmat(seed, n)
    return (G + G.conj().T) / 2


def psd(seed, n):
    G = cmat(seed, n)
    return G @ G.conj().T


def unitary(seed, n):
    Q, R = np.linalg.qr(cmat(seed, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))
