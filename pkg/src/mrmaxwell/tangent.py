"""Consistent tangent operators by central-difference differentiation.

The tangent is the derivative of the discrete stress update with respect
to the discrete strain input, taken with the internal state entering the
step held fixed.  Stress and strain tensors are flattened to 6-vectors:

* stress vector  (T11, T22, T33, T12, T13, T23)
* strain vector  (C11, C22, C33, 2 C12, 2 C13, 2 C23)

so the resulting 6x6 matrix is directly comparable with the symmetry
diagnostics of :func:`symmetry_deviation`.  Perturbing strain-vector slot
j by h therefore means adding h to a diagonal entry of C, or h/2 to both
off-diagonal slots of a shear pair.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from . import tensor3 as t3

__all__ = [
    "stress_to_voigt",
    "voigt_to_stress",
    "strain_to_voigt",
    "voigt_to_strain",
    "consistent_tangent",
    "symmetry_deviation",
]

_SHEAR_SLOTS = ((0, 1), (0, 2), (1, 2))


def stress_to_voigt(T: np.ndarray) -> np.ndarray:
    """(T11, T22, T33, T12, T13, T23)."""
    return np.array(
        [T[0, 0], T[1, 1], T[2, 2], T[0, 1], T[0, 2], T[1, 2]]
    )


def voigt_to_stress(v: np.ndarray) -> np.ndarray:
    return np.array(
        [[v[0], v[3], v[4]], [v[3], v[1], v[5]], [v[4], v[5], v[2]]]
    )


def strain_to_voigt(C: np.ndarray) -> np.ndarray:
    """(C11, C22, C33, 2 C12, 2 C13, 2 C23); exact round trip with
    :func:`voigt_to_strain` (doubling and halving are exact in binary)."""
    return np.array(
        [C[0, 0], C[1, 1], C[2, 2], 2.0 * C[0, 1], 2.0 * C[0, 2], 2.0 * C[1, 2]]
    )


def voigt_to_strain(v: np.ndarray) -> np.ndarray:
    s12, s13, s23 = v[3] / 2.0, v[4] / 2.0, v[5] / 2.0
    return np.array(
        [[v[0], s12, s13], [s12, v[1], s23], [s13, s23, v[2]]]
    )


def _perturbed_pair(C, j, h):
    Cp = C.copy()
    Cm = C.copy()
    if j < 3:
        Cp[j, j] += h
        Cm[j, j] -= h
    else:
        k, l = _SHEAR_SLOTS[j - 3]
        Cp[k, l] += h / 2.0
        Cp[l, k] += h / 2.0
        Cm[k, l] -= h / 2.0
        Cm[l, k] -= h / 2.0
    return Cp, Cm


def consistent_tangent(
    stepper: Callable,
    C_next: np.ndarray,
    state,
    dt: float,
    p,
    h: float | None = None,
) -> np.ndarray:
    """6x6 derivative of the stress update by central differences.

    ``stepper`` is any Lagrangian step function ``(C, state, dt, params)
    -> StepResult``; the state entering the step is held fixed while the
    strain input is perturbed.  The default step ``h = 1e-6 *
    max(||C||_F, 1)`` sits near the double-precision optimum for central
    differences.  If a perturbed strain loses positive definiteness the
    step is shrunk once by a factor 10, after which DomainError is
    raised.
    """
    if h is None:
        h = 1e-6 * max(float(np.linalg.norm(C_next)), 1.0)
    if not h > 0.0:
        raise DomainError("finite-difference step h must be positive")

    for attempt in (h, h / 10.0):
        pairs = [_perturbed_pair(C_next, j, attempt) for j in range(6)]
        if all(t3.is_spd(Cp) and t3.is_spd(Cm) for Cp, Cm in pairs):
            h = attempt
            break
    else:
        raise DomainError(
            "perturbed strain is not SPD even after shrinking h"
        )

    tangent = np.empty((6, 6))
    for j, (Cp, Cm) in enumerate(pairs):
        Tp = stress_to_voigt(stepper(Cp, state, dt, p).stress)
        Tm = stress_to_voigt(stepper(Cm, state, dt, p).stress)
        tangent[:, j] = (Tp - Tm) / (2.0 * h)
    return tangent


def symmetry_deviation(tangent_history: Sequence[np.ndarray]) -> float:
    """Normalized asymmetry ``max_t ||M - M^T|| / max_t ||M||`` over a
    history of 6x6 tangents (Frobenius norms).  Scale invariant."""
    if len(tangent_history) == 0:
        raise DomainError("tangent history must not be empty")
    num = max(float(np.linalg.norm(M - M.T)) for M in tangent_history)
    den = max(float(np.linalg.norm(M)) for M in tangent_history)
    if den == 0.0:
        return 0.0
    return num / den
