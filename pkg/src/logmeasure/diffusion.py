"""Diffusively coupled pair of identical linear systems.

Two agents x' = Ax + D(z - x), z' = Az + D(x - z) with a nonnegative
diagonal diffusion gain D. The change of coordinates p = (x + z, z - x)
block-diagonalizes the coupled dynamics into A and A - 2D, so the agents
synchronize (x - z -> 0) exactly when A - 2D is Hurwitz. Diffusion can
destroy stability: A Hurwitz does not imply A - 2D Hurwitz unless the
matrix is additively D-stable with margin, which is why the stability
module's analysis feeds this one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import as_square_matrix, as_vector, diag_entries
from .errors import (
    BaseNotHurwitz,
    InconsistentOracles,
    NotNonnegativeDiagonal,
    StepTooLarge,
)
from .stability import HURWITZ_TOL, is_hurwitz

DIVERGENCE_CUTOFF = 1e6
STEP_NORM_BOUND = 0.1


@dataclass
class CoupledSystem:
    A: np.ndarray
    D: np.ndarray
    block: np.ndarray


@dataclass
class Trajectory:
    """Fixed-step trajectory of the coupled pair.

    states rows are (x(t), z(t)) concatenated; sync_metric is the
    euclidean distance between the two agents at each step. diverged
    marks an early stop at the overflow cutoff.
    """

    times: np.ndarray
    states: np.ndarray
    sync_metric: np.ndarray
    diverged: bool = False


def build_coupled(A, D) -> CoupledSystem:
    """Assemble the 2n x 2n block [[A-D, D], [D, A-D]].

    The decoupling similarity is re-verified on every build: conjugating
    by [[I, I], [-I, I]] must produce diag(A, A-2D) to 1e-10, anything
    else means the block was assembled wrong.
    """
    A = as_square_matrix(A)
    n = A.shape[0]
    d = diag_entries(D, n)
    if np.any(d < 0.0):
        raise NotNonnegativeDiagonal("diffusion gains must be >= 0")
    Dm = np.diag(d)
    block = np.block([[A - Dm, Dm], [Dm, A - Dm]])

    eye = np.eye(n)
    T = np.block([[eye, eye], [-eye, eye]])
    Tinv = 0.5 * np.block([[eye, -eye], [eye, eye]])
    decoupled = T @ block @ Tinv
    target = np.block([[A, np.zeros((n, n))], [np.zeros((n, n)), A - 2.0 * Dm]])
    if np.max(np.abs(decoupled - target)) > 1e-10:
        raise InconsistentOracles("coupled block failed the decoupling similarity check")
    return CoupledSystem(A, Dm, block)


def sync_verdict(A, D, tol: float = HURWITZ_TOL) -> bool:
    """Synchronization criterion: x - z -> 0 iff A - 2D is Hurwitz.

    Stated for Hurwitz A only; a non-Hurwitz base matrix raises
    BaseNotHurwitz instead of guessing.
    """
    A = as_square_matrix(A)
    d = diag_entries(D, A.shape[0])
    if np.any(d < 0.0):
        raise NotNonnegativeDiagonal("diffusion gains must be >= 0")
    if not is_hurwitz(A, tol):
        raise BaseNotHurwitz("synchronization criterion assumes A Hurwitz")
    return is_hurwitz(A - 2.0 * np.diag(d), tol)


def simulate(A, D, x0, z0, horizon: float, dt: float) -> Trajectory:
    """Integrate the coupled pair with fixed-step classical RK4.

    dt must not exceed the horizon and must satisfy
    dt * ||block||_inf <= 0.1; integration stops early (diverged=True)
    once any state entry passes the overflow cutoff.
    """
    if dt <= 0.0 or horizon <= 0.0:
        raise ValueError("horizon and dt must be positive")
    system = build_coupled(A, D)
    n = system.A.shape[0]
    x0 = as_vector(x0, n)
    z0 = as_vector(z0, n)
    if dt > horizon:
        raise StepTooLarge("dt exceeds the horizon")
    B = system.block
    bnorm = float(np.abs(B).sum(axis=1).max())
    if dt * bnorm > STEP_NORM_BOUND + 1e-12:
        limit = STEP_NORM_BOUND / bnorm if bnorm > 0 else np.inf
        raise StepTooLarge(f"dt * ||block||_inf = {dt * bnorm:.3g} > 0.1; need dt <= {limit:.3g}")

    steps = int(np.ceil(horizon / dt - 1e-9))
    y = np.concatenate([x0, z0])
    times = [0.0]
    states = [y.copy()]
    sync = [float(np.linalg.norm(x0 - z0))]
    diverged = False
    for k in range(steps):
        k1 = B @ y
        k2 = B @ (y + 0.5 * dt * k1)
        k3 = B @ (y + 0.5 * dt * k2)
        k4 = B @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        times.append((k + 1) * dt)
        states.append(y.copy())
        sync.append(float(np.linalg.norm(y[:n] - y[n:])))
        if np.abs(y).max() > DIVERGENCE_CUTOFF:
            diverged = True
            break
    return Trajectory(np.asarray(times), np.vstack(states), np.asarray(sync), diverged)
