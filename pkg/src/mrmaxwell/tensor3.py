"""Exact 3x3 tensor algebra for finite-strain constitutive updates.

All routines operate on plain numpy arrays of shape (3, 3):

* ``Tensor3``     is any such array (deformation gradients, rotations, ...).
* ``SymTensor3``  is one that is symmetric bit-for-bit.  Symmetry is a
  construction invariant, not a numerical coincidence: every operation in
  this package that returns a symmetric tensor builds it through
  :func:`sym`, whose output satisfies ``A[i, j] == A[j, i]`` exactly.

Determinants, inverses and traces use closed-form 3x3 expressions.
Spectral routines (:func:`sym_eigen`, :func:`spd_sqrt`) are backed by
LAPACK through ``numpy.linalg.eigh``, which handles repeated eigenvalues
robustly; repeated spectra occur at every stress-free state, so this is
the common case rather than the exception.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

__all__ = [
    "IDENTITY",
    "EigenSystem3",
    "det",
    "trace",
    "inverse",
    "deviator",
    "unimodular",
    "sym",
    "is_spd",
    "require_spd",
    "sym_eigen",
    "spd_sqrt",
    "spd_inv_sqrt",
    "spd_sqrt_pair",
    "mat_exp",
]

IDENTITY = np.eye(3)
IDENTITY.setflags(write=False)

_F = [float(math.factorial(k)) for k in range(14)]

# Exact symmetrization: (m_ij + m_ji) is the same floating-point sum for
# both index orders, so the result is symmetric bit-for-bit.


def sym(A: np.ndarray, check: bool = True, scale: float = 0.0) -> np.ndarray:
    """Symmetric part (A + A^T)/2.

    With ``check`` enabled (and unless running under ``python -O``) the
    discarded skew part is asserted to be round-off sized; the callers in
    this package only symmetrize products that are symmetric in exact
    arithmetic, so a large skew part indicates a bug upstream.  ``scale``
    sets the magnitude of the operands the product was formed from, for
    results that are small by cancellation (e.g. stresses near a relaxed
    state); the bound is 1e-10 * max(||result||, scale).
    """
    S = (A + A.T) / 2.0
    if check:
        assert _skew_norm_ok(A, S, scale), "asymmetry exceeds round-off bound"
    return S


def _skew_norm_ok(A, S, scale=0.0, rel=1e-10):
    skew = np.linalg.norm(A - A.T)
    return skew <= rel * max(np.linalg.norm(S), scale, 1e-300)


def det(A: np.ndarray) -> float:
    """Determinant by cofactor expansion."""
    return float(
        A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
        - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
        + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0])
    )


def trace(A: np.ndarray) -> float:
    return float(A[0, 0] + A[1, 1] + A[2, 2])


def inverse(A: np.ndarray) -> np.ndarray:
    """Closed-form cofactor inverse.

    Raises
    ------
    DomainError
        If the determinant is zero or not finite.  Near-singular inputs
        are not rejected; accuracy then degrades with the condition
        number (``A @ inverse(A) = I`` holds to ~1e-13 * cond(A)).
    """
    d = det(A)
    if d == 0.0 or not math.isfinite(d):
        raise DomainError(f"singular tensor, det = {d}")
    out = np.empty((3, 3))
    out[0, 0] = A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1]
    out[0, 1] = A[0, 2] * A[2, 1] - A[0, 1] * A[2, 2]
    out[0, 2] = A[0, 1] * A[1, 2] - A[0, 2] * A[1, 1]
    out[1, 0] = A[1, 2] * A[2, 0] - A[1, 0] * A[2, 2]
    out[1, 1] = A[0, 0] * A[2, 2] - A[0, 2] * A[2, 0]
    out[1, 2] = A[0, 2] * A[1, 0] - A[0, 0] * A[1, 2]
    out[2, 0] = A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0]
    out[2, 1] = A[0, 1] * A[2, 0] - A[0, 0] * A[2, 1]
    out[2, 2] = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    out /= d
    return out


def deviator(A: np.ndarray) -> np.ndarray:
    """Traceless part A - tr(A)/3 * I."""
    return A - (trace(A) / 3.0) * IDENTITY


def unimodular(A: np.ndarray) -> np.ndarray:
    """Determinant-one rescaling (det A)^(-1/3) * A.

    Raises
    ------
    DomainError
        If det(A) <= 0.
    """
    d = det(A)
    if not d > 0.0:
        raise DomainError(f"unimodular part requires det > 0, got det = {d}")
    return A / np.cbrt(d)


def is_spd(A: np.ndarray) -> bool:
    """Positive definiteness of a symmetric tensor via leading minors."""
    m1 = A[0, 0]
    m2 = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    return bool(m1 > 0.0 and m2 > 0.0 and det(A) > 0.0)


def require_spd(A: np.ndarray, name: str = "tensor") -> None:
    if not np.isfinite(A).all():
        raise DomainError(f"{name} has non-finite entries")
    if not is_spd(A):
        raise DomainError(f"{name} is not symmetric positive definite")


class EigenSystem3(NamedTuple):
    """Spectral decomposition of a symmetric tensor.

    ``values`` holds the eigenvalues sorted in descending order,
    ``vectors`` the matching orthonormal eigenvectors as columns, so that
    ``(vectors * values) @ vectors.T`` reconstructs the input.
    """

    values: np.ndarray
    vectors: np.ndarray


def sym_eigen(A: np.ndarray) -> EigenSystem3:
    """Eigenvalues (descending) and orthonormal eigenvectors of a
    symmetric tensor."""
    w, V = np.linalg.eigh(A)
    return EigenSystem3(w[::-1].copy(), V[:, ::-1].copy())


def _spd_eigen(A, name):
    w, V = np.linalg.eigh(A)
    floor = 1e-14 * np.linalg.norm(A)
    if not w[0] > floor:
        raise DomainError(
            f"{name} is not positive definite (min eigenvalue {w[0]:.3e})",
            min_eigenvalue=float(w[0]),
        )
    return w, V


def spd_sqrt(A: np.ndarray) -> np.ndarray:
    """Principal square root of a symmetric positive definite tensor."""
    w, V = _spd_eigen(A, "spd_sqrt argument")
    return sym((V * np.sqrt(w)) @ V.T, check=False)


def spd_inv_sqrt(A: np.ndarray) -> np.ndarray:
    """Inverse principal square root of an SPD tensor."""
    w, V = _spd_eigen(A, "spd_inv_sqrt argument")
    return sym((V / np.sqrt(w)) @ V.T, check=False)


def spd_sqrt_pair(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Square root and inverse square root from a single decomposition.

    The two factors come from the same eigenvector basis, so their
    product is the identity to within one or two ulps.
    """
    w, V = _spd_eigen(A, "spd_sqrt_pair argument")
    r = np.sqrt(w)
    return sym((V * r) @ V.T, check=False), sym((V / r) @ V.T, check=False)


def mat_exp(A: np.ndarray) -> np.ndarray:
    """Matrix exponential of a general 3x3 tensor.

    Scaling and squaring: A is halved until its 1-norm is at most 0.5,
    the exponential of the scaled tensor is summed as a degree-13 Taylor
    polynomial (remainder below 1e-16 at that norm), and the result is
    squared back up.
    """
    norm1 = float(np.abs(A).sum(axis=0).max())
    if not math.isfinite(norm1):
        raise DomainError("mat_exp argument has non-finite entries")
    squarings = max(0, math.ceil(math.log2(norm1 / 0.5))) if norm1 > 0.5 else 0
    B = A / (2.0**squarings)
    # degree-13 Taylor polynomial, grouped in powers of B^4
    B2 = B @ B
    B3 = B @ B2
    B4 = B2 @ B2
    I = np.eye(3)
    H0 = I + B + B2 / _F[2] + B3 / _F[3]
    H1 = I / _F[4] + B / _F[5] + B2 / _F[6] + B3 / _F[7]
    H2 = I / _F[8] + B / _F[9] + B2 / _F[10] + B3 / _F[11]
    H3 = I / _F[12] + B / _F[13]
    E = H0 + B4 @ (H1 + B4 @ (H2 + B4 @ H3))
    for _ in range(squarings):
        E = E @ E
    return E
