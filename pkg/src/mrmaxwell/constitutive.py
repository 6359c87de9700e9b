"""Single-branch finite-strain Maxwell material with Mooney-Rivlin elasticity.

The material combines an isochoric Mooney-Rivlin spring (shear moduli
``c10``, ``c01``) in series with a Newtonian dashpot (viscosity ``eta``).
The internal variable is the inelastic right Cauchy-Green tensor ``Ci``,
which lives on the manifold of symmetric positive definite tensors with
unit determinant.

Five implicit time steppers are provided:

``ifebm_step_lagrangian``
    Closed-form backward-Euler update (no iterations).  The discretized
    evolution equation reduces, after a congruence with the inverse
    square root of the unimodular strain, to a tensor quadratic
    ``phi * X = A - eps * X**2`` whose positive definite root is written
    down directly; the scalar ``phi`` enforcing ``det(X) = 1`` is
    obtained from a first-order perturbation estimate.
``ifebm_step_eulerian``
    The same update driven by deformation gradients on the current
    configuration, evolving the unimodular inverse elastic left
    Cauchy-Green tensor.  Step for step it predicts the same stress as
    the Lagrangian form.
``twoiter_step``
    The closed-form update followed by exactly two scalar Newton
    corrections of ``phi`` on the residual ``det(X(phi)) - 1``; this
    sharpens the symmetry of the consistent tangent operator.
``mebm_step``
    Backward Euler with exact determinant projection, solved by Newton
    iteration on the six symmetric components (baseline).
``em_step``
    Exponential-map integrator, also solved by Newton iteration
    (baseline).

The Newton-based baselines start from the previous state and may fail to
converge for large steps; they then bisect the step recursively.  The
closed-form steppers never iterate and never substep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError, DomainError
from . import tensor3 as t3
from .tensor3 import det, deviator, inverse, sym, trace, unimodular

__all__ = [
    "MaterialParams",
    "LagrangianState",
    "EulerianState",
    "StepDiagnostics",
    "StepResult",
    "stress_2pk",
    "kirchhoff_eulerian",
    "solve_phi",
    "quad_root_X",
    "quad_root_X_subtractive",
    "residual_R",
    "ifebm_step_lagrangian",
    "ifebm_step_eulerian",
    "twoiter_step",
    "mebm_step",
    "em_step",
    "reference_solve",
    "ReferenceSolution",
    "eulerian_state_from_lagrangian",
    "LAGRANGIAN_STEPPERS",
]

_DET_ONE_TOL = 1e-12


@dataclass(frozen=True)
class MaterialParams:
    """One Maxwell branch: shear moduli (stress units) and viscosity
    (stress * time)."""

    c10: float
    c01: float
    eta: float

    def __post_init__(self):
        if self.c10 < 0.0 or self.c01 < 0.0 or self.c10 + self.c01 <= 0.0:
            raise DomainError("shear moduli must be >= 0 with c10 + c01 > 0")
        if not self.eta > 0.0:
            raise DomainError("viscosity eta must be positive")


def _frozen_array(obj, name, value):
    arr = np.array(value, dtype=float)
    if arr.shape != (3, 3):
        raise DomainError(f"{name} must be a 3x3 array")
    arr.setflags(write=False)
    object.__setattr__(obj, name, arr)
    return arr


def _check_manifold(A, name):
    if not np.isfinite(A).all():
        raise DomainError(f"{name} has non-finite entries")
    if not (A == A.T).all():
        raise DomainError(f"{name} must be exactly symmetric (use tensor3.sym)")
    if not t3.is_spd(A):
        raise DomainError(f"{name} is not positive definite")
    d = det(A)
    if abs(d - 1.0) > _DET_ONE_TOL:
        raise DomainError(f"{name} must be unimodular, det = {d!r}")


@dataclass(frozen=True)
class LagrangianState:
    """Inelastic right Cauchy-Green tensor; symmetric, positive definite,
    determinant one."""

    Ci: np.ndarray

    def __post_init__(self):
        Ci = _frozen_array(self, "Ci", self.Ci)
        _check_manifold(Ci, "Ci")

    @classmethod
    def identity(cls) -> "LagrangianState":
        return cls(np.eye(3))


@dataclass(frozen=True)
class EulerianState:
    """Unimodular inverse elastic left Cauchy-Green tensor plus the
    deformation gradient of the last accepted step."""

    Be_inv_bar: np.ndarray
    F_prev: np.ndarray

    def __post_init__(self):
        B = _frozen_array(self, "Be_inv_bar", self.Be_inv_bar)
        _check_manifold(B, "Be_inv_bar")
        F = _frozen_array(self, "F_prev", self.F_prev)
        if not np.isfinite(F).all() or not det(F) > 0.0:
            raise DomainError("F_prev must be finite with positive determinant")

    @classmethod
    def identity(cls) -> "EulerianState":
        return cls(np.eye(3), np.eye(3))


def eulerian_state_from_lagrangian(F: np.ndarray, Ci: np.ndarray) -> EulerianState:
    """Spatial state equivalent to (F, Ci):  unimodular(F^-T Ci F^-1)."""
    Finv = inverse(F)
    return EulerianState(unimodular(sym(Finv.T @ Ci @ Finv, check=False)), F)


@dataclass(frozen=True)
class StepDiagnostics:
    """Solver telemetry for one accepted step.

    ``iterations`` counts Newton iterations (0 for the closed-form
    steppers, 2 by construction for the two-correction stepper).
    ``substeps`` counts bisection events of the Newton baselines and
    ``divergences`` their abandoned Newton attempts; both stay 0 on the
    iteration-free paths.  ``phi0``/``phi``/``eps`` are only set by the
    steppers that solve the tensor quadratic.
    """

    phi0: Optional[float] = None
    phi: Optional[float] = None
    eps: Optional[float] = None
    iterations: int = 0
    substeps: int = 0
    divergences: int = 0
    used_fallback: bool = False


@dataclass(frozen=True)
class StepResult:
    """New state plus the stress at the end of the step.

    ``stress`` is the 2nd Piola-Kirchhoff tensor for Lagrangian steppers
    and the Kirchhoff tensor for the Eulerian stepper.
    """

    state: object
    stress: np.ndarray
    diagnostics: StepDiagnostics


# --------------------------------------------------------------------------
# stress laws


def stress_2pk(C: np.ndarray, Ci: np.ndarray, p: MaterialParams) -> np.ndarray:
    """2nd Piola-Kirchhoff stress of one Maxwell branch.

    ``C^-1 (c10 unimodular(C) Ci^-1 - c01 Ci unimodular(C)^-1)^D``.
    The product is symmetric in exact arithmetic and symmetrized after
    evaluation.
    """
    t3.require_spd(C, "C")
    t3.require_spd(Ci, "Ci")
    if abs(det(Ci) - 1.0) > 1e-10:
        raise DomainError("Ci must be unimodular within 1e-10")
    Cbar = unimodular(C)
    return _stress_from_parts(inverse(C), Cbar, inverse(Cbar), Ci, p)


def kirchhoff_eulerian(Be_inv_bar: np.ndarray, p: MaterialParams) -> np.ndarray:
    """Kirchhoff stress from the unimodular inverse elastic left
    Cauchy-Green tensor (purely deviatoric)."""
    t3.require_spd(Be_inv_bar, "Be_inv_bar")
    if abs(det(Be_inv_bar) - 1.0) > 1e-10:
        raise DomainError("Be_inv_bar must be unimodular within 1e-10")
    Be_bar = inverse(Be_inv_bar)
    return p.c10 * deviator(Be_bar) - p.c01 * deviator(Be_inv_bar)


# --------------------------------------------------------------------------
# the tensor quadratic phi X = A - eps X^2


def solve_phi(A: np.ndarray, eps: float) -> tuple[float, float]:
    """Volume-correction scalar for the tensor quadratic.

    Returns ``(phi0, phi)`` with ``phi0 = det(A)**(1/3)`` and the
    first-order estimate ``phi = phi0 - tr(A)/(3 phi0) * eps``.  The
    estimate is exact for isotropic A and for ``eps = 0``.
    """
    if eps < 0.0:
        raise DomainError("eps must be non-negative")
    d = det(A)
    if not d > 0.0:
        raise DomainError(f"solve_phi requires det(A) > 0, got {d}")
    phi0 = float(np.cbrt(d))
    phi = phi0 - trace(A) / (3.0 * phi0) * eps if eps != 0.0 else phi0
    return phi0, phi


def _root_eigvals(w: np.ndarray, phi: float, eps: float) -> np.ndarray:
    # Positive root of eps x^2 + phi x - w = 0 per eigenvalue, evaluated
    # in whichever of the two algebraically equivalent forms avoids
    # subtractive cancellation for the sign of phi at hand.
    disc = np.sqrt(phi * phi + 4.0 * eps * w)
    if phi >= 0.0:
        return 2.0 * w / (disc + phi)
    return (disc - phi) / (2.0 * eps)


def quad_root_X(A: np.ndarray, phi: float, eps: float) -> np.ndarray:
    """Positive definite root of ``phi X = A - eps X**2``.

    Evaluated in the eigenbasis of A, which makes the closed form
    ``2 A [(phi^2 I + 4 eps A)^(1/2) + phi I]^-1`` stable down to
    eps -> 0 (where it degenerates to ``A / phi``).
    """
    if eps < 0.0:
        raise DomainError("eps must be non-negative")
    if eps == 0.0:
        if not phi > 0.0:
            raise DomainError("phi must be positive when eps = 0")
        return A / phi
    w, V = np.linalg.eigh(A)
    if not w[0] > 0.0:
        raise DomainError(
            "quad_root_X requires SPD A", min_eigenvalue=float(w[0])
        )
    return sym((V * _root_eigvals(w, phi, eps)) @ V.T, check=False)


def quad_root_X_subtractive(A: np.ndarray, phi: float, eps: float) -> np.ndarray:
    """Subtractive evaluation ``[(phi^2 I + 4 eps A)^(1/2) - phi I] / (2 eps)``.

    Kept only for the robustness study: for small eps the square root is
    computed to machine precision but the cancellation error is then
    amplified by 1/eps.  Never use this on a production path.
    """
    if not eps > 0.0:
        raise DomainError("subtractive form requires eps > 0")
    w, V = np.linalg.eigh(A)
    if not w[0] > 0.0:
        raise DomainError(
            "quad_root_X_subtractive requires SPD A", min_eigenvalue=float(w[0])
        )
    x = (np.sqrt(phi * phi + 4.0 * eps * w) - phi) / (2.0 * eps)
    return sym((V * x) @ V.T, check=False)


def residual_R(phi: float, A: np.ndarray, eps: float) -> float:
    """Unit-determinant residual ``det(X(phi)) - 1`` of the root."""
    return det(quad_root_X(A, phi, eps)) - 1.0


# --------------------------------------------------------------------------
# closed-form steppers


def _strain_parts(C_next, with_inverses=True):
    # unimodular strain, its square-root factors and (optionally) the
    # inverses, from one determinant and one decomposition
    d = det(C_next)
    if not d > 0.0:
        raise DomainError(f"strain input must have det > 0, got {d}")
    scale = np.cbrt(d)
    Cbar = C_next / scale
    w, V = np.linalg.eigh(Cbar)
    if not w[0] > 0.0:
        raise DomainError(
            "strain input is not positive definite", min_eigenvalue=float(w[0])
        )
    r = np.sqrt(w)
    sq = (V * r) @ V.T
    isq = (V / r) @ V.T
    if not with_inverses:
        return Cbar, sq, isq, None, None
    Cbar_inv = sym((V / w) @ V.T, check=False)
    return Cbar, sq, isq, Cbar_inv, Cbar_inv / scale


def _stress_from_parts(C_inv, Cbar, Cbar_inv, Ci, p):
    # the raw product c10 Cbar Ci^-1 - c01 Ci Cbar^-1 cancels badly near
    # relaxed states (Ci ~ Cbar); rewriting it through D = Ci - Cbar is
    # algebraically identical and keeps the round-off at the size of D
    D = Ci - Cbar
    term = p.c10 * (D @ inverse(Ci)) + p.c01 * (D @ Cbar_inv)
    scale = float(np.linalg.norm(C_inv)) * (
        float(np.linalg.norm(term)) + (p.c10 + p.c01) * 1e-12
    )
    return -sym(C_inv @ deviator(term), scale=scale)


def _quadratic_setup(isq, Ci, beta):
    # the congruence of Ci + beta * Cbar splits exactly into
    # isq Ci isq + beta I, so the beta part shifts the spectrum without
    # entering the floating-point assembly
    W = sym(isq @ Ci @ isq, check=False)
    w, V = np.linalg.eigh(W)
    if not w[0] > 0.0:
        raise DomainError(
            "quadratic input lost positive definiteness",
            min_eigenvalue=float(w[0]),
        )
    return w + beta, V


def _phi_estimate(w, eps):
    d = float(w[0] * w[1] * w[2])
    phi0 = float(np.cbrt(d))
    phi = phi0 - float(w.sum()) / (3.0 * phi0) * eps if eps != 0.0 else phi0
    return phi0, phi


def _finish_update(sq, w, V, phi, eps):
    X = (V * _root_eigvals(w, phi, eps)) @ V.T
    return unimodular(sym(sq @ X @ sq, check=False))


def ifebm_step_lagrangian(
    C_next: np.ndarray, state: LagrangianState, dt: float, p: MaterialParams
) -> StepResult:
    """Iteration-free backward-Euler update on the reference configuration.

    Closed form; preserves symmetry, positive definiteness and the unit
    determinant of the internal variable for any dt >= 0.
    """
    if dt < 0.0:
        raise DomainError("dt must be non-negative")
    t3.require_spd(C_next, "C_next")
    Cbar, sq, isq, Cbar_inv, C_inv = _strain_parts(C_next)
    beta = dt * p.c10 / p.eta
    eps = dt * p.c01 / p.eta
    w, V = _quadratic_setup(isq, state.Ci, beta)
    phi0, phi = _phi_estimate(w, eps)
    Ci_new = _finish_update(sq, w, V, phi, eps)
    diag = StepDiagnostics(phi0=phi0, phi=phi, eps=eps, iterations=0)
    return StepResult(
        LagrangianState(Ci_new),
        _stress_from_parts(C_inv, Cbar, Cbar_inv, Ci_new, p),
        diag,
    )


def twoiter_step(
    C_next: np.ndarray, state: LagrangianState, dt: float, p: MaterialParams
) -> StepResult:
    """Closed-form update plus exactly two scalar Newton corrections of
    the volume-correction scalar.

    The corrections drive ``det(X(phi)) - 1`` to zero; the derivative is
    taken by central differences with step ``1e-6 * max(phi0, 1)``.  If
    the derivative degenerates (|R'| < 1e-14) the estimate from
    :func:`solve_phi` is kept and the fallback flag is set.
    """
    if dt < 0.0:
        raise DomainError("dt must be non-negative")
    t3.require_spd(C_next, "C_next")
    Cbar, sq, isq, Cbar_inv, C_inv = _strain_parts(C_next)
    beta = dt * p.c10 / p.eta
    eps = dt * p.c01 / p.eta
    w, V = _quadratic_setup(isq, state.Ci, beta)
    phi0, phi_est = _phi_estimate(w, eps)

    def residual(phi):
        return float(np.prod(_root_eigvals(w, phi, eps))) - 1.0

    h = 1e-6 * max(phi0, 1.0)
    phi = phi_est
    fallback = False
    for _ in range(2):
        r = residual(phi)
        slope = (residual(phi + h) - residual(phi - h)) / (2.0 * h)
        if abs(slope) < 1e-14:
            phi = phi_est
            fallback = True
            break
        phi -= r / slope
    Ci_new = _finish_update(sq, w, V, phi, eps)
    diag = StepDiagnostics(
        phi0=phi0, phi=phi, eps=eps, iterations=2, used_fallback=fallback
    )
    return StepResult(
        LagrangianState(Ci_new),
        _stress_from_parts(C_inv, Cbar, Cbar_inv, Ci_new, p),
        diag,
    )


def ifebm_step_eulerian(
    F_next: np.ndarray, state: EulerianState, dt: float, p: MaterialParams
) -> StepResult:
    """Iteration-free update on the current configuration.

    Driven by the relative deformation gradient between the last
    accepted and the new placement; returns the Kirchhoff stress.
    """
    if dt < 0.0:
        raise DomainError("dt must be non-negative")
    if not np.isfinite(F_next).all() or not det(F_next) > 0.0:
        raise DomainError("F_next must be finite with positive determinant")
    F_rel_bar = unimodular(F_next @ inverse(state.F_prev))
    G = inverse(F_rel_bar)
    trial_inv = sym(G.T @ state.Be_inv_bar @ G, check=False)
    # adding beta * I shifts the trial spectrum exactly
    beta = dt * p.c10 / p.eta
    eps = dt * p.c01 / p.eta
    w_t, V = np.linalg.eigh(trial_inv)
    if not w_t[0] > 0.0:
        raise DomainError(
            "trial state lost positive definiteness",
            min_eigenvalue=float(w_t[0]),
        )
    w = w_t + beta
    phi0, phi = _phi_estimate(w, eps)
    Be_inv_new = unimodular(
        sym((V * _root_eigvals(w, phi, eps)) @ V.T, check=False)
    )
    diag = StepDiagnostics(phi0=phi0, phi=phi, eps=eps, iterations=0)
    return StepResult(
        EulerianState(Be_inv_new, F_next),
        kirchhoff_eulerian(Be_inv_new, p),
        diag,
    )


# --------------------------------------------------------------------------
# Newton-based baselines


def _tr_dot(A, B):
    # trace(A @ B) for symmetric A, B
    return float((A * B).sum())


def _pack(A):
    return np.array([A[0, 0], A[1, 1], A[2, 2], A[0, 1], A[0, 2], A[1, 2]])


def _unpack(x):
    return np.array(
        [[x[0], x[3], x[4]], [x[3], x[1], x[5]], [x[4], x[5], x[2]]]
    )


class _NewtonFailure(Exception):
    def __init__(self, iterations):
        super().__init__(iterations)
        self.iterations = iterations


def _newton_solve(rhs, Ci_n, label):
    """Solve Ci = rhs(Ci) on the six symmetric components.

    Plain Newton from Ci_n with forward-difference Jacobian.  Raises
    _NewtonFailure (carrying the iteration count) when the iteration
    exhausts its budget or leaves the admissible set.
    """
    tol = 1e-12 * np.linalg.norm(Ci_n)
    big = 1e8 * max(1.0, np.linalg.norm(Ci_n))
    x = _pack(Ci_n)
    iterations = 0
    for _ in range(50):
        Ci = _unpack(x)
        try:
            R = Ci - rhs(Ci)
        except DomainError:
            raise _NewtonFailure(iterations)
        rnorm = np.linalg.norm(R)
        if not math.isfinite(rnorm) or rnorm > big:
            raise _NewtonFailure(iterations)
        if rnorm < tol:
            # indefinite roots satisfy the equations but are off the
            # manifold; treat them as divergence and bisect
            if not t3.is_spd(Ci):
                raise _NewtonFailure(iterations)
            return Ci, iterations
        iterations += 1
        g = _pack(R)
        delta = 1e-7 * max(np.linalg.norm(Ci), 1.0)
        J = np.empty((6, 6))
        try:
            for j in range(6):
                xp = x.copy()
                xp[j] += delta
                Cp = _unpack(xp)
                J[:, j] = (_pack(Cp - rhs(Cp)) - g) / delta
            step = np.linalg.solve(J, g)
        except (DomainError, np.linalg.LinAlgError):
            raise _NewtonFailure(iterations)
        if not np.isfinite(step).all():
            raise _NewtonFailure(iterations)
        x = x - step
    raise _NewtonFailure(iterations)


def _substepping_solve(make_rhs, Ci_n, dt, label, depth=0):
    """Newton solve with recursive step bisection as the recovery path."""
    try:
        Ci_new, iters = _newton_solve(make_rhs(Ci_n, dt), Ci_n, label)
        return Ci_new, StepDiagnostics(iterations=iters)
    except _NewtonFailure as fail:
        if depth >= 20:
            raise ConvergenceError(
                f"{label}: no convergence after bisecting to depth {depth}"
            )
        half = dt / 2.0
        Ci_mid, d1 = _substepping_solve(make_rhs, Ci_n, half, label, depth + 1)
        Ci_new, d2 = _substepping_solve(make_rhs, Ci_mid, half, label, depth + 1)
        return Ci_new, StepDiagnostics(
            iterations=fail.iterations + d1.iterations + d2.iterations,
            substeps=1 + d1.substeps + d2.substeps,
            divergences=1 + d1.divergences + d2.divergences,
        )


def mebm_step(
    C_next: np.ndarray, state: LagrangianState, dt: float, p: MaterialParams
) -> StepResult:
    """Backward Euler with exact determinant projection (Newton baseline).

    Solves ``Ci = unimodular(Ci_n + dt * f(Ci) Ci)`` on the six
    symmetric components; the projection makes det(Ci) = 1 by
    construction.  Divergent Newton runs bisect the step (depth <= 20).
    """
    if dt < 0.0:
        raise DomainError("dt must be non-negative")
    t3.require_spd(C_next, "C_next")
    Cbar = unimodular(C_next)
    Cbar_inv = inverse(Cbar)

    def flow_times_ci(Ci):
        # f(Ci) Ci, written in the manifestly symmetric form
        Ci_inv = inverse(Ci)
        tr_part = (
            p.c10 * _tr_dot(Cbar, Ci_inv) - p.c01 * _tr_dot(Ci, Cbar_inv)
        ) / 3.0
        return (
            p.c10 * Cbar
            - p.c01 * sym(Ci @ Cbar_inv @ Ci, check=False)
            - tr_part * Ci
        ) / p.eta

    def make_rhs(Ci_n, h):
        def rhs(Ci):
            return unimodular(Ci_n + h * flow_times_ci(Ci))

        return rhs

    Ci_new, diag = _substepping_solve(make_rhs, state.Ci, dt, "mebm")
    Ci_new = unimodular(sym(Ci_new, check=False))
    return StepResult(
        LagrangianState(Ci_new), stress_2pk(C_next, Ci_new, p), diag
    )


def em_step(
    C_next: np.ndarray, state: LagrangianState, dt: float, p: MaterialParams
) -> StepResult:
    """Exponential-map integrator (Newton baseline).

    Solves ``Ci = exp(dt * f(Ci)) Ci_n``.  The flow ``f`` is traceless,
    so the exponential is volume preserving up to round-off; the result
    is projected with :func:`~mrmaxwell.tensor3.unimodular` for
    exactness.  Same Newton and substepping policy as :func:`mebm_step`.
    """
    if dt < 0.0:
        raise DomainError("dt must be non-negative")
    t3.require_spd(C_next, "C_next")
    Cbar = unimodular(C_next)
    Cbar_inv = inverse(Cbar)

    def flow(Ci):
        return deviator(
            (p.c10 * (Cbar @ inverse(Ci)) - p.c01 * (Ci @ Cbar_inv)) / p.eta
        )

    def make_rhs(Ci_n, h):
        def rhs(Ci):
            arg = h * flow(Ci)
            # exp would overflow double precision; report as divergence
            if np.abs(arg).sum(axis=0).max() > 700.0:
                raise DomainError("exponential argument too large")
            return sym(t3.mat_exp(arg) @ Ci_n, check=False)

        return rhs

    Ci_new, diag = _substepping_solve(make_rhs, state.Ci, dt, "em")
    Ci_new = unimodular(sym(Ci_new, check=False))
    return StepResult(
        LagrangianState(Ci_new), stress_2pk(C_next, Ci_new, p), diag
    )


LAGRANGIAN_STEPPERS: dict[str, Callable] = {
    "ifebm": ifebm_step_lagrangian,
    "2iebm": twoiter_step,
    "mebm": mebm_step,
    "em": em_step,
}


# --------------------------------------------------------------------------
# fine-substep reference


@dataclass
class ReferenceSolution:
    """Output of :func:`reference_solve`.

    ``richardson_gap`` is the largest Frobenius change of any output
    stress when the substep count is doubled; values above the caller's
    accuracy target mean the reference is not converged.
    """

    t: np.ndarray
    states: list
    stresses: list
    richardson_gap: float


def _march(C_of_t, Ci0, t_grid, p, n_substeps):
    state = LagrangianState(np.array(Ci0))
    states = [state.Ci]
    stresses = [stress_2pk(C_of_t(float(t_grid[0])), state.Ci, p)]
    for k in range(len(t_grid) - 1):
        t0, t1 = float(t_grid[k]), float(t_grid[k + 1])
        h = (t1 - t0) / n_substeps
        beta = h * p.c10 / p.eta
        eps = h * p.c01 / p.eta
        Ci = state.Ci
        for s in range(1, n_substeps + 1):
            Cbar, sq, isq, _, _ = _strain_parts(
                C_of_t(t0 + s * h), with_inverses=False
            )
            w, V = _quadratic_setup(isq, Ci, beta)
            _, phi = _phi_estimate(w, eps)
            Ci = _finish_update(sq, w, V, phi, eps)
        state = LagrangianState(Ci)
        states.append(state.Ci)
        stresses.append(stress_2pk(C_of_t(t1), state.Ci, p))
    return states, stresses


def reference_solve(
    C_of_t: Callable[[float], np.ndarray],
    Ci0: np.ndarray,
    t_grid,
    p: MaterialParams,
    n_substeps: int,
    check_richardson: bool = True,
) -> ReferenceSolution:
    """Fine-substep solution used as the accuracy yardstick.

    Integrates with the closed-form stepper using ``n_substeps`` uniform
    substeps per output interval.  When ``check_richardson`` is set the
    run is repeated with doubled substeps and the largest stress change
    at any output time is reported, so callers can judge whether the
    reference is converged to their target.
    """
    if n_substeps < 1:
        raise DomainError("n_substeps must be >= 1")
    t_grid = np.asarray(t_grid, dtype=float)
    states, stresses = _march(C_of_t, Ci0, t_grid, p, n_substeps)
    gap = math.nan
    if check_richardson:
        _, finer = _march(C_of_t, Ci0, t_grid, p, 2 * n_substeps)
        gap = max(
            float(np.linalg.norm(a - b)) for a, b in zip(stresses, finer)
        )
    return ReferenceSolution(t_grid, states, stresses, gap)
