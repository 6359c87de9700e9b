"""Tour of the single-branch Maxwell material.

Steps one material point through a stretch-then-shear history with the
closed-form stepper, then shows the two defining limits of the model:
elastic response for tiny steps and complete stress relaxation for huge
ones.  Run from the repository root:

    python3 demos/01_single_branch_basics.py
"""

import numpy as np

import mrmaxwell as mm
from mrmaxwell import tensor3 as t3

p = mm.MaterialParams(c10=1.0, c01=1.0, eta=1.0)
print(f"material: c10={p.c10}, c01={p.c01}, eta={p.eta}")

# a short strain-driven history: uniaxial stretch, then superposed shear
def F_of(lam, gamma):
    F = np.diag([lam, lam**-0.5, lam**-0.5])
    F[0, 1] = gamma
    return t3.unimodular(F)

history = [F_of(1.0 + 0.05 * k, 0.03 * k) for k in range(1, 9)]

state = mm.LagrangianState.identity()
print("\n t      lambda  gamma   ||2PK stress||   det Ci")
for k, F in enumerate(history, start=1):
    C = t3.sym(F.T @ F, check=False)
    res = mm.ifebm_step_lagrangian(C, state, 0.1, p)
    state = res.state
    print(
        f"{0.1 * k:4.1f}    {1 + 0.05 * k:.2f}   {0.03 * k:.2f}    "
        f"{np.linalg.norm(res.stress):12.6f}   {t3.det(state.Ci):+.15f}"
    )

# tiny step: the dashpot has no time to flow, the response is elastic
C_last = t3.sym(history[-1].T @ history[-1], check=False)
frozen = mm.ifebm_step_lagrangian(C_last, state, 1e-9, p)
elastic = mm.stress_2pk(C_last, state.Ci, p)
print(
    "\nelastic limit: stress change over a 1e-9 step =",
    f"{np.linalg.norm(frozen.stress - elastic):.2e}",
)

# huge step: the dashpot erases the elastic strain entirely
relaxed = mm.ifebm_step_lagrangian(C_last, state, 1e12, p)
print(
    "relaxation limit: ||Ci - unimodular(C)|| =",
    f"{np.linalg.norm(relaxed.state.Ci - t3.unimodular(C_last)):.2e}",
    " residual stress =",
    f"{np.linalg.norm(relaxed.stress):.2e}",
)

# the Eulerian form of the same update, driven by F instead of C
eul = mm.EulerianState.identity()
lag = mm.LagrangianState.identity()
for F in history:
    C = t3.sym(F.T @ F, check=False)
    lag = mm.ifebm_step_lagrangian(C, lag, 0.1, p).state
    eul = mm.ifebm_step_eulerian(F, eul, 0.1, p).state
S_lag = history[-1] @ mm.stress_2pk(C_last, lag.Ci, p) @ history[-1].T
S_eul = mm.kirchhoff_eulerian(eul.Be_inv_bar, p)
print(
    "Lagrangian vs Eulerian Kirchhoff stress gap:",
    f"{np.linalg.norm(S_lag - S_eul):.2e}",
)
