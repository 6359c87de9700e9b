"""Shared random-tensor generators for the test suite.

All randomness is seeded per test through numpy Generators, so the suite
is reproducible run to run.
"""

import math

import numpy as np
import pytest

from mrmaxwell import tensor3 as t3


def rand_rotation(rng):
    """Haar-ish random proper rotation from a QR factorization."""
    Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def rand_spd(rng, lo=0.25, hi=4.0):
    """Random SPD tensor with eigenvalues log-uniform in [lo, hi]."""
    Q = rand_rotation(rng)
    d = np.exp(rng.uniform(math.log(lo), math.log(hi), 3))
    return t3.sym((Q * d) @ Q.T, check=False)


def rand_unimodular_spd(rng, lo=0.25, hi=4.0):
    return t3.sym(t3.unimodular(rand_spd(rng, lo, hi)), check=False)


def rand_unimodular(rng, lo=0.5, hi=2.0):
    """Random volume-preserving tensor (rotation times SPD stretch)."""
    return rand_rotation(rng) @ rand_unimodular_spd(rng, lo, hi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
