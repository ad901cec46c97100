"""Induced matrix norms, matrix measures, and the eigenvalue sandwich.

The matrix measure (logarithmic norm) of A under a vector norm is the
right-hand derivative of h -> ||I + h A|| at h = 0+. Exact routes:

* ``closed_form``          l_1 / l_2 / l_inf Table-style formulas,
* ``scaled_closed_form``   the same formulas applied to T A T^-1,
* ``exact_polyhedral``     vertex maximization for norms with polytope
  balls; the measure comes from the halving difference quotient
  (||I + h A|| - 1)/h, which is exactly linear below the first
  breakpoint of the piecewise-linear map h -> ||I + h A||.

Everything else is ``estimated``: multi-start ascent on the unit sphere
for norms, a decreasing-h quotient for measures, always with a positive
error_bound and never a claim of exactness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .common import as_rng, as_square_matrix
from .errors import (
    DimensionMismatch,
    EigenFailure,
    NoExactPath,
    QuotientNotConverged,
)
from .norms import ValidatedNorm

_EPS = float(np.finfo(float).eps)


@dataclass
class MeasureResult:
    """Value of an induced norm or matrix measure plus provenance.

    error_bound is 0 exactly when the method is one of the exact routes.
    h_used records the final finite-difference step for quotient-based
    methods.
    """

    value: float
    method: str
    error_bound: float = 0.0
    h_used: float | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"non-finite result value {self.value}")
        if self.error_bound < 0:
            raise ValueError("error_bound must be nonnegative")
        if (self.error_bound == 0) != (self.method != "estimated"):
            raise ValueError("error_bound must be positive iff method == 'estimated'")

    def to_jsonable(self) -> dict:
        doc = {
            "value": self.value,
            "method": self.method,
            "error_bound": self.error_bound,
        }
        if self.h_used is not None:
            doc["h_used"] = self.h_used
        return doc


def _closed_norm(A: np.ndarray, p: float) -> float:
    if p == 1:
        return float(np.abs(A).sum(axis=0).max())
    if p == math.inf:
        return float(np.abs(A).sum(axis=1).max())
    try:
        return float(np.linalg.norm(A, 2))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigenFailure(f"SVD failed: {exc}") from exc


def _closed_mu(A: np.ndarray, p: float) -> float:
    d = np.diag(A)
    if p == 1:
        return float((d + np.abs(A).sum(axis=0) - np.abs(d)).max())
    if p == math.inf:
        return float((d + np.abs(A).sum(axis=1) - np.abs(d)).max())
    try:
        return float(np.linalg.eigvalsh(0.5 * (A + A.T))[-1])
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigenFailure(f"symmetric eigensolver failed: {exc}") from exc


def _bind_matrix(A, norm: ValidatedNorm) -> np.ndarray:
    M = as_square_matrix(A)
    if norm.dim is not None and M.shape[0] != norm.dim:
        raise DimensionMismatch(f"matrix is {M.shape[0]}x{M.shape[0]} but norm has dim {norm.dim}")
    return M


def _poly_vertex_norm(A: np.ndarray, norm: ValidatedNorm) -> float:
    V = norm.ball_vertices
    return float(np.max(norm.evaluate_many(V @ A.T)))


def _poly_measure(A: np.ndarray, norm: ValidatedNorm) -> MeasureResult:
    """Halving quotient for polytope-ball norms.

    h -> ||I + h A|| is convex piecewise linear (a max of finitely many
    affine functions of h), equal to 1 + mu(A) h below its first positive
    breakpoint, so two agreeing quotients at h and h/2 pin mu exactly up
    to float noise. The agreement test adds a noise floor of order eps/h
    because the quotient subtracts two values near 1.
    """
    V = norm.ball_vertices
    VA = V @ A.T

    def quotient(h: float) -> float:
        return (float(np.max(norm.evaluate_many(V + h * VA))) - 1.0) / h

    h = 1e-3
    q_prev = quotient(h)
    for _ in range(60):
        q_next = quotient(h / 2)
        tol = 1e-12 * (1.0 + abs(q_next)) + 64.0 * _EPS / h
        if abs(q_prev - q_next) <= tol:
            return MeasureResult(q_next, "exact_polyhedral", 0.0, h_used=h / 2)
        h /= 2
        q_prev = q_next
    raise QuotientNotConverged(
        f"quotient still moving at h={h:.3e} (last value {q_prev:.12g})"
    )


def estimate_induced_norm(
    A,
    norm: ValidatedNorm,
    *,
    seed: int | np.random.Generator | None = None,
    starts: int = 12,
    nonnegative: bool = False,
) -> MeasureResult:
    """Multi-start ascent estimate of ||A|| for norms with no exact route.

    Maximizes |Ax| / |x| with Nelder-Mead from unit-vector, all-ones,
    top-singular-vector, and random starts. With nonnegative=True the
    search is restricted to the nonnegative orthant (x = |u|). The value
    is a lower bound attained at a concrete vector; error_bound is the
    spread of the converged starts plus the termination tolerance, a
    heuristic gap indicator rather than a rigorous bracket.
    """
    A = _bind_matrix(A, norm)
    n = A.shape[0]
    rng = as_rng(seed)

    def ratio(u: np.ndarray) -> float:
        x = np.abs(u) if nonnegative else u
        nx = float(norm.evaluate_many(x[None, :])[0])
        if nx < 1e-12:
            return 0.0
        return float(norm.evaluate_many((A @ x)[None, :])[0]) / nx

    start_list: list[np.ndarray] = [np.ones(n)]
    start_list.extend(np.eye(n))
    try:
        _, _, vt = np.linalg.svd(A)
        top = vt[0]
        start_list.append(np.abs(top) if nonnegative else top)
        if not nonnegative:
            start_list.append(-top)
    except np.linalg.LinAlgError:
        pass
    while len(start_list) < max(starts, 4):
        u = rng.standard_normal(n)
        start_list.append(np.abs(u) if nonnegative else u)

    results = []
    for u0 in start_list:
        res = minimize(
            lambda u: -ratio(u),
            u0,
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-12, "maxiter": 2000, "maxfev": 4000},
        )
        results.append(max(-float(res.fun), ratio(u0)))
    value = max(results)
    spread = value - min(results)
    error_bound = spread + 1e-9 * (1.0 + abs(value))
    return MeasureResult(value, "estimated", error_bound)


def induced_matrix_norm(
    A,
    norm: ValidatedNorm,
    *,
    seed: int | np.random.Generator | None = None,
) -> MeasureResult:
    """Operator norm of A induced by the vector norm: max_{|x|=1} |A x|."""
    A = _bind_matrix(A, norm)
    route = norm.route
    if route == "closed":
        return MeasureResult(_closed_norm(A, norm.p), "closed_form")
    if route == "scaled_closed":
        M = norm.flat_T @ A @ norm.flat_Tinv
        return MeasureResult(_closed_norm(M, norm.core_p), "scaled_closed_form")
    if route == "polyhedral":
        return MeasureResult(_poly_vertex_norm(A, norm), "exact_polyhedral")
    return estimate_induced_norm(A, norm, seed=seed)


def matrix_measure(
    A,
    norm: ValidatedNorm,
    *,
    seed: int | np.random.Generator | None = None,
) -> MeasureResult:
    """Matrix measure (logarithmic norm) of A under the vector norm."""
    A = _bind_matrix(A, norm)
    route = norm.route
    if route == "closed":
        return MeasureResult(_closed_mu(A, norm.p), "closed_form")
    if route == "scaled_closed":
        M = norm.flat_T @ A @ norm.flat_Tinv
        return MeasureResult(_closed_mu(M, norm.core_p), "scaled_closed_form")
    if route == "polyhedral":
        return _poly_measure(A, norm)
    return _estimated_measure(A, norm, seed)


def _estimated_measure(A: np.ndarray, norm: ValidatedNorm, seed) -> MeasureResult:
    """Decreasing-h quotient with the gap between successive quotients reported.

    The quotient is nonincreasing as h decreases and upper-bounds the
    measure, so the final value is a monotone upper estimate.
    """
    rng = as_rng(seed)
    eye = np.eye(A.shape[0])

    def quotient(h: float) -> tuple[float, float]:
        nr = estimate_induced_norm(eye + h * A, norm, seed=rng)
        return (nr.value - 1.0) / h, nr.error_bound / h

    h = 1e-3
    prev, _ = quotient(h)
    gap = math.inf
    nerr = 0.0
    for _ in range(10):
        h /= 2
        cur, nerr = quotient(h)
        gap = abs(prev - cur)
        prev = cur
        if gap <= 1e-6 * (1.0 + abs(cur)):
            break
    error_bound = gap + nerr + 1e-9 * (1.0 + abs(prev))
    return MeasureResult(prev, "estimated", error_bound, h_used=h)


def measure_quotient(A, norm: ValidatedNorm, h: float, *, seed=None) -> float:
    """One-sided difference quotient (||I + h A|| - 1)/h at a given h > 0.

    Nonincreasing as h decreases; upper-bounds the matrix measure.
    """
    if not (h > 0):
        raise ValueError(f"h must be positive, got {h}")
    A = _bind_matrix(A, norm)
    eye = np.eye(A.shape[0])
    nr = induced_matrix_norm(eye + h * A, norm, seed=seed)
    return (nr.value - 1.0) / h


def spectral_abscissa(A) -> float:
    """Largest real part over the spectrum of A."""
    A = as_square_matrix(A)
    try:
        lam = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigenvalue computation failed: {exc}") from exc
    return float(lam.real.max())


@dataclass
class SandwichReport:
    """spectral abscissa <= matrix measure <= induced norm, checked."""

    abscissa: float
    measure: float
    norm_value: float
    passed: bool

    def to_jsonable(self) -> dict:
        return {
            "abscissa": self.abscissa,
            "measure": self.measure,
            "norm_value": self.norm_value,
            "passed": self.passed,
        }


def check_measure_sandwich(A, norm: ValidatedNorm, tol: float = 1e-9) -> SandwichReport:
    """Verify s(A) <= mu(A) <= ||A|| under a norm with an exact route."""
    if norm.route == "estimated":
        raise NoExactPath("sandwich check requires an exact measure route")
    A = _bind_matrix(A, norm)
    s = spectral_abscissa(A)
    mu = matrix_measure(A, norm).value
    nv = induced_matrix_norm(A, norm).value
    passed = (s <= mu + tol) and (mu <= nv + tol)
    return SandwichReport(s, mu, nv, passed)
