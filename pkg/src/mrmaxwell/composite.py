"""Generalized Maxwell model: equilibrium branch plus parallel Maxwell
branches.

The equilibrium branch is a Mooney-Rivlin spring with a polyconvex
volumetric term; it carries no internal state and is evaluated, never
integrated.  Each Maxwell branch is the single-branch material from
:mod:`mrmaxwell.constitutive` with its own parameters and internal
variable, advanced independently within a step.  Total stress is the sum
of the branch stresses.

Incompressibility is handled exactly rather than by a large bulk
modulus: with ``k = "incompressible"`` the volumetric term is dropped
and the stress becomes determinate only up to a pressure, which
:func:`uniaxial_axial_stress` eliminates through the lateral
traction-free condition of the uniaxial protocol.

Model parameters can be read from a JSON document::

    {"equilibrium": {"c10": .., "c01": .., "k": <number or "incompressible">},
     "branches": [{"c10": .., "c01": .., "eta": ..}, ...]}

A bundled file (:func:`table_model_path`) carries the parameter set of a
cartilaginous temporomandibular joint: four Maxwell branches with moduli
0.25, 0.25, 0.36, 1.25 MPa (c10 = c01), viscosities 25.0, 5.0, 0.144,
0.005 MPa s, and an equilibrium branch with 0.2/0.2 MPa.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from . import tensor3 as t3
from .tensor3 import det, deviator, inverse, sym, unimodular
from .constitutive import (
    LagrangianState,
    MaterialParams,
    StepDiagnostics,
    ifebm_step_lagrangian,
    stress_2pk,
)

__all__ = [
    "EquilibriumParams",
    "CompositeModel",
    "CompositeStepResult",
    "equilibrium_stress",
    "composite_step",
    "uniaxial_axial_stress",
    "load_model",
    "table_model_path",
]


@dataclass(frozen=True)
class EquilibriumParams:
    """Equilibrium spring: Mooney-Rivlin moduli plus bulk modulus.

    ``k = math.inf`` marks the incompressible limit (no volumetric
    stress; an indeterminate pressure takes its place).
    """

    c10: float
    c01: float
    k: float

    def __post_init__(self):
        if self.c10 < 0.0 or self.c01 < 0.0:
            raise DomainError("equilibrium moduli must be non-negative")
        if not self.k > 0.0:
            raise DomainError("bulk modulus must be positive (or inf)")

    @property
    def incompressible(self) -> bool:
        return math.isinf(self.k)


@dataclass(frozen=True)
class CompositeModel:
    equilibrium: EquilibriumParams
    branches: tuple[MaterialParams, ...]
    states: tuple[LagrangianState, ...]

    def __post_init__(self):
        if len(self.branches) != len(self.states):
            raise DomainError("one state per Maxwell branch required")

    @classmethod
    def relaxed(
        cls, equilibrium: EquilibriumParams, branches: Sequence[MaterialParams]
    ) -> "CompositeModel":
        """Model with all branch states at the identity."""
        branches = tuple(branches)
        return cls(
            equilibrium,
            branches,
            tuple(LagrangianState.identity() for _ in branches),
        )


def equilibrium_stress(C: np.ndarray, p: EquilibriumParams) -> np.ndarray:
    """2nd Piola-Kirchhoff stress of the equilibrium branch.

    Isochoric part ``C^-1 (c10 unimodular(C) - c01 unimodular(C)^-1)^D``
    plus, for finite bulk modulus, the volumetric part
    ``k/10 ((det C)^(5/2) - (det C)^(-5/2)) C^-1``.  In the
    incompressible limit the volumetric part is omitted; the pressure it
    stands in for must be supplied by the boundary conditions of the
    driving protocol.
    """
    t3.require_spd(C, "C")
    Cbar = unimodular(C)
    C_inv = inverse(C)
    Cbar_inv = inverse(Cbar)
    scale = float(np.linalg.norm(C_inv)) * (
        p.c10 * np.linalg.norm(Cbar) + p.c01 * np.linalg.norm(Cbar_inv)
    )
    iso = sym(C_inv @ deviator(p.c10 * Cbar - p.c01 * Cbar_inv), scale=scale)
    if p.incompressible:
        return iso
    d = det(C)
    return iso + (p.k / 10.0) * (d**2.5 - d**-2.5) * C_inv


@dataclass(frozen=True)
class CompositeStepResult:
    model: CompositeModel
    total_stress: np.ndarray
    equilibrium_part: np.ndarray
    branch_stresses: tuple[np.ndarray, ...]
    branch_diagnostics: tuple[StepDiagnostics, ...]


def composite_step(
    C_next: np.ndarray,
    model: CompositeModel,
    dt: float,
    stepper: Callable = ifebm_step_lagrangian,
) -> CompositeStepResult:
    """Advance every Maxwell branch independently and sum the stresses.

    For the incompressible model the returned stress excludes the
    indeterminate pressure term ``-p C^-1``.
    """
    eq = equilibrium_stress(C_next, model.equilibrium)
    results = [
        stepper(C_next, state, dt, params)
        for params, state in zip(model.branches, model.states)
    ]
    total = eq.copy()
    for r in results:
        total += r.stress
    new_model = CompositeModel(
        model.equilibrium,
        model.branches,
        tuple(r.state for r in results),
    )
    return CompositeStepResult(
        new_model,
        total,
        eq,
        tuple(r.stress for r in results),
        tuple(r.diagnostics for r in results),
    )


def _check_uniaxial_isochoric(F):
    lam = F[0, 0]
    off = abs(F[0, 1]) + abs(F[0, 2]) + abs(F[1, 0]) + abs(F[1, 2]) + abs(
        F[2, 0]
    ) + abs(F[2, 1])
    if not lam > 0.0 or off > 1e-12 * max(lam, 1.0):
        raise DomainError("F is not of the uniaxial diagonal form")
    if abs(F[1, 1] - F[2, 2]) > 1e-12 * lam or abs(
        lam * F[1, 1] * F[2, 2] - 1.0
    ) > 1e-8:
        raise DomainError("F is not volume preserving uniaxial")
    return lam


def uniaxial_axial_stress(
    model: CompositeModel, F_history: Sequence[np.ndarray], dt: float,
    stepper: Callable = ifebm_step_lagrangian,
) -> tuple[np.ndarray, CompositeModel]:
    """Axial engineering stress along a volume-preserving uniaxial history.

    ``F_history[k]`` must be ``diag(1 + e, (1 + e)^(-1/2), (1 + e)^(-1/2))``.
    The first entry is taken as the initial placement (no step); each
    following entry advances the model by ``dt``.  For the incompressible
    model the pressure is eliminated by requiring zero lateral Cauchy
    stress, and the axial 1st Piola-Kirchhoff stress (force per unit
    reference area) is returned.
    """
    if not model.equilibrium.incompressible:
        raise DomainError(
            "traction-free uniaxial evaluation requires the incompressible model"
        )
    if dt <= 0.0:
        raise DomainError("dt must be positive")

    stresses = np.empty(len(F_history))
    current = model
    for k, F in enumerate(F_history):
        lam = _check_uniaxial_isochoric(F)
        C = sym(F.T @ F, check=False)
        if k == 0:
            T_iso = equilibrium_stress(C, model.equilibrium)
            for params, state in zip(model.branches, model.states):
                T_iso = T_iso + stress_2pk(C, state.Ci, params)
        else:
            res = composite_step(C, current, dt, stepper)
            current = res.model
            T_iso = res.total_stress
        sigma = F @ T_iso @ F.T  # Kirchhoff = Cauchy here (det F = 1)
        pressure = (sigma[1, 1] + sigma[2, 2]) / 2.0
        stresses[k] = (sigma[0, 0] - pressure) / lam
    return stresses, current


def load_model(source) -> CompositeModel:
    """Build a relaxed CompositeModel from a JSON file path or dict."""
    if isinstance(source, dict):
        doc = source
    else:
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    try:
        eq = doc["equilibrium"]
        k = eq["k"]
        if k == "incompressible":
            k = math.inf
        equilibrium = EquilibriumParams(float(eq["c10"]), float(eq["c01"]), float(k))
        branches = [
            MaterialParams(float(b["c10"]), float(b["c01"]), float(b["eta"]))
            for b in doc["branches"]
        ]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed model document: {exc}") from exc
    return CompositeModel.relaxed(equilibrium, branches)


def table_model_path() -> str:
    """Path of the bundled temporomandibular-joint parameter file."""
    return str(resources.files("mrmaxwell").joinpath("data/tmj_cartilage.json"))
