"""Pure NumPy/SciPy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable; the
compiled module mirrors the same signatures.  The tridiagonal solve delegates
to LAPACK through scipy.linalg.solve_banded.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

NAME = "numpy"


def thomas(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the tridiagonal system
    lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i].

    lower[0] and upper[-1] are ignored.
    """
    n = diag.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return solve_banded((1, 1), ab, rhs)


def interface_flux(
    fnode: np.ndarray, q: np.ndarray, speed: np.ndarray, theta: float
) -> np.ndarray:
    """Blended numerical flux at the n-1 cell interfaces.

    F[i+1/2] = (fnode[i] + fnode[i+1])/2
               - (theta/2) * max(speed[i], speed[i+1]) * (q[i+1] - q[i])

    theta = 0 is the plain second-order central flux; theta = 1 the local
    Lax-Friedrichs flux.
    """
    a_half = np.maximum(speed[:-1], speed[1:])
    return 0.5 * (fnode[:-1] + fnode[1:]) - 0.5 * theta * a_half * (q[1:] - q[:-1])


def advect_biased(u: np.ndarray, q: np.ndarray, dx: float, theta: float) -> np.ndarray:
    """Non-conservative advection term u * q_x with an upwind-style bias.

    Interior: u_i*(q[i+1]-q[i-1])/(2dx) - (theta/2)*|u_i|*(q[i+1]-2q[i]+q[i-1])/dx.
    Boundary entries are zero (boundary nodes are held by the solver's BC).
    """
    out = np.zeros_like(q)
    out[1:-1] = u[1:-1] * (q[2:] - q[:-2]) / (2.0 * dx) - 0.5 * theta * np.abs(u[1:-1]) * (
        q[2:] - 2.0 * q[1:-1] + q[:-2]
    ) / dx
    return out
