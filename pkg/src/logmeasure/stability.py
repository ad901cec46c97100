"""Admissible matrix measures and additive diagonal stability.

A matrix measure induced by a vector norm is admissible when
mu(-D) <= 0 for every nonnegative diagonal D. Four equivalent
characterizations are checked against each other here: orthant
monotonicity of the norm, nonpositivity of mu(-D), the identity
mu(D) = max_i d_ii, and the uniform margin mu(-I - D) < 0. Any
disagreement between the exact classifier and the sampled measure
conditions signals a bug in this package, never a mathematical
outcome, and raises InconsistentOracles.

A matrix A is additively D-stable when A - D is Hurwitz for every
nonnegative diagonal D. For n = 2 this is decided exactly; Metzler
matrices reduce to a Hurwitz check; otherwise we look for a
certificate (an admissible measure with mu(A) < 0) and, failing
that, search for a destabilizing D. Absence of a counterexample
never upgrades the verdict past "unknown".
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .classify import Verdict, is_orthant_monotonic
from .common import DEFAULT_SEED, as_rng, as_square_matrix, diag_entries
from .errors import (
    InconsistentOracles,
    Marginal,
    NoExactPath,
    NotAdmissibleWarning,
    NotMetzler,
    NotOrthantMonotonic,
    WrongDimension,
)
from .measures import matrix_measure, spectral_abscissa
from .norms import Lp, Scaled, ValidatedNorm, validate_norm_spec

ADMISSIBILITY_TOL = 1e-9
HURWITZ_TOL = 1e-9
FALSIFY_THRESHOLD = 1e-6


def is_hurwitz(A, tol: float = HURWITZ_TOL) -> bool:
    """True iff every eigenvalue has real part < -tol.

    Raises Marginal when the spectral abscissa lands inside the
    [-tol, tol] band; the verdict is withheld rather than guessed.
    """
    s = spectral_abscissa(as_square_matrix(A))
    if abs(s) <= tol:
        raise Marginal(f"spectral abscissa {s:.3e} within {tol:g} of zero")
    return s < 0.0


def _sample_nonneg_diagonals(n: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Structured diagonals first (they catch the known failure modes), then
    log-uniform fill with occasional exact zeros."""
    diags: list[np.ndarray] = [np.arange(1.0, n + 1.0), np.ones(n)]
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        diags.append(e)
        diags.append(2.0 * e)
        diags.append(np.ones(n) - e)
    while len(diags) < count:
        d = np.exp(rng.uniform(np.log(1e-3), np.log(10.0), n))
        if rng.random() < 0.2:
            d[rng.integers(n)] = 0.0
        diags.append(d)
    return diags[:max(count, 1)]


@dataclass
class AdmissibilityVerdict:
    admissible: bool
    exact: bool
    counterexample_D: np.ndarray | None
    equivalence_trace: dict[str, Verdict] = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        ce = self.counterexample_D
        return {
            "admissible": self.admissible,
            "exact": self.exact,
            "counterexample_D": None if ce is None else ce.tolist(),
            "equivalence_trace": {k: v.to_jsonable() for k, v in self.equivalence_trace.items()},
        }


def is_admissible_measure(
    norm: ValidatedNorm,
    budget: int = 200,
    *,
    seed: int | np.random.Generator | None = DEFAULT_SEED,
) -> AdmissibilityVerdict:
    """Decide admissibility of the measure induced by `norm`.

    The primary decision is the orthant-monotonicity classifier. The
    three measure-side conditions are cross-checked on `budget` sampled
    nonnegative diagonals and recorded in equivalence_trace under the
    keys negated_diagonal_measure (mu(-D) <= 0), diagonal_measure_identity
    (mu(D) = max d_ii), and uniform_margin (mu(-I-D) < 0, the A = -I
    instance of the existential condition).

    When not admissible, counterexample_D is a nonnegative diagonal with
    mu(-D) > 0, preferring the first sampled violation so results are
    reproducible for a fixed seed.
    """
    om = is_orthant_monotonic(norm, seed=seed)
    trace: dict[str, Verdict] = {"orthant_monotonic": om}
    numeric_names = ("negated_diagonal_measure", "diagonal_measure_identity", "uniform_margin")

    if norm.kind == "lp" and (norm.route == "estimated" or norm.dim is None):
        # Absolute norms are admissible outright; without a closed measure
        # path the numeric spot checks are skipped rather than faked.
        for name in numeric_names:
            trace[name] = Verdict(True, False, None, 0)
        return AdmissibilityVerdict(True, True, None, trace)
    if norm.route == "estimated":
        raise NoExactPath("admissibility cross-checks need an exact measure path")

    n = norm.dim
    rng = as_rng(seed)
    diags = _sample_nonneg_diagonals(n, budget, rng)
    eye = np.eye(n)

    c2_w = c3_w = c4_w = None
    checks = 0
    for d in diags:
        D = np.diag(d)
        checks += 1
        if c2_w is None and matrix_measure(-D, norm).value > ADMISSIBILITY_TOL:
            c2_w = D
        if c3_w is None and abs(matrix_measure(D, norm).value - d.max()) > ADMISSIBILITY_TOL:
            c3_w = D
        if c4_w is None and matrix_measure(-eye - D, norm).value >= -ADMISSIBILITY_TOL:
            c4_w = D
        if c2_w is not None and c3_w is not None and c4_w is not None:
            break

    for name, w in zip(numeric_names, (c2_w, c3_w, c4_w)):
        trace[name] = Verdict(w is None, w is not None, w, checks)

    counterexample = c2_w
    if counterexample is None and c4_w is not None:
        # mu(-D) = mu(-I-D) + 1 >= 1, so the margin violator works directly
        counterexample = c4_w
    if counterexample is None and c3_w is not None:
        # translation: mu(-(max(d) I - D)) = mu(D) - max(d) > 0
        d = np.diag(c3_w)
        counterexample = np.diag(d.max() * np.ones(n) - d)
    if counterexample is None and not om.holds:
        # a projection violation at coordinate j forces mu(-diag(e_j)) > 0
        for j in range(n):
            E = np.zeros((n, n))
            E[j, j] = 1.0
            if matrix_measure(-E, norm).value > ADMISSIBILITY_TOL:
                counterexample = E
                break

    if counterexample is not None:
        if matrix_measure(-counterexample, norm).value <= ADMISSIBILITY_TOL:
            raise InconsistentOracles(
                "constructed admissibility counterexample failed to re-verify"
            )
        if om.holds:
            raise InconsistentOracles(
                "norm classified orthant-monotonic but a diagonal measure condition failed"
            )
        return AdmissibilityVerdict(False, om.exact, counterexample, trace)

    if not om.holds:
        raise InconsistentOracles(
            "norm classified not orthant-monotonic but no diagonal counterexample exists"
        )
    return AdmissibilityVerdict(True, om.exact, None, trace)


def measure_of_diagonal(
    norm: ValidatedNorm,
    D,
    *,
    budget: int = 40,
    seed: int | np.random.Generator | None = DEFAULT_SEED,
) -> float:
    """mu(D) for diagonal D (entries of either sign).

    Under an admissible measure this equals max_i d_ii, and mu(-D) equals
    -min_i d_ii; both identities are asserted to 1e-9. For inadmissible
    norms the value is still returned, flagged with NotAdmissibleWarning.
    """
    d = diag_entries(D, norm.dim)
    value = matrix_measure(np.diag(d), norm).value
    verdict = is_admissible_measure(norm, budget=budget, seed=seed)
    if not verdict.admissible:
        warnings.warn(
            "measure is not admissible; diagonal identities are not guaranteed",
            NotAdmissibleWarning,
            stacklevel=2,
        )
        return value
    neg = matrix_measure(-np.diag(d), norm).value
    if abs(value - d.max()) > 1e-9 or abs(neg + d.min()) > 1e-9:
        raise InconsistentOracles("admissible measure violated the diagonal identities")
    return value


def perturbation_bounds(A, D, norm: ValidatedNorm) -> tuple[float, float, float]:
    """(lo, hi, mu_exact) with lo = mu(A) - max d_ii, hi = mu(A) - min d_ii.

    Requires an orthant-monotonic norm with an exact measure path; the
    directly computed mu(A - D) is asserted to lie in [lo, hi].
    """
    A = as_square_matrix(A, norm.dim)
    d = diag_entries(D, A.shape[0])
    if norm.route == "estimated":
        raise NoExactPath("perturbation bounds need an exact measure path")
    om = is_orthant_monotonic(norm)
    if not om.holds:
        raise NotOrthantMonotonic("perturbation bounds require an orthant-monotonic norm")
    mu_a = matrix_measure(A, norm).value
    lo = mu_a - float(d.max())
    hi = mu_a - float(d.min())
    mu_exact = matrix_measure(A - np.diag(d), norm).value
    if not (lo - 1e-9 <= mu_exact <= hi + 1e-9):
        raise InconsistentOracles(
            f"mu(A-D) = {mu_exact:.12g} escaped [{lo:.12g}, {hi:.12g}]"
        )
    return lo, hi, mu_exact


@dataclass
class DiagonalSignReport:
    mu: float
    diag_ok: bool

    def to_jsonable(self) -> dict:
        return {"mu": self.mu, "diag_ok": self.diag_ok}


def diagonal_negativity_check(A, norm: ValidatedNorm) -> DiagonalSignReport:
    """mu(A) < 0 forces a negative diagonal; check that implication on A."""
    A = as_square_matrix(A, norm.dim)
    if norm.route == "estimated":
        raise NoExactPath("diagonal negativity check needs an exact measure path")
    om = is_orthant_monotonic(norm)
    if not om.holds:
        raise NotOrthantMonotonic("diagonal negativity check requires orthant monotonicity")
    mu = matrix_measure(A, norm).value
    diag_ok = bool(np.all(np.diag(A) < 0.0))
    if mu < 0.0 and not diag_ok:
        raise InconsistentOracles(
            "mu(A) < 0 under an orthant-monotonic norm but some a_ii >= 0"
        )
    return DiagonalSignReport(mu, diag_ok)


def additive_d_stable_2x2(A) -> bool:
    """Exact test for 2x2: tr(A) < 0, det(A) > 0, and a_11, a_22 <= 0."""
    A = as_square_matrix(A)
    if A.shape[0] != 2:
        raise WrongDimension("exact additive D-stability test is 2x2 only")
    tr = float(A[0, 0] + A[1, 1])
    det = float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    return tr < 0.0 and det > 0.0 and A[0, 0] <= 0.0 and A[1, 1] <= 0.0


def additive_d_stable_metzler(A, tol: float = HURWITZ_TOL) -> bool:
    """For Metzler A (off-diagonal >= 0), additive D-stability is Hurwitz."""
    A = as_square_matrix(A)
    off = A[~np.eye(A.shape[0], dtype=bool)]
    if np.any(off < 0.0):
        raise NotMetzler("matrix has a negative off-diagonal entry")
    return is_hurwitz(A, tol)


@dataclass
class Certificate:
    norm: ValidatedNorm
    mu: float

    def to_jsonable(self) -> dict:
        from .norms import norm_spec_to_json

        return {"norm": norm_spec_to_json(self.norm), "mu": self.mu}


@dataclass
class Counterexample:
    D: np.ndarray
    abscissa: float

    def to_jsonable(self) -> dict:
        return {"D": self.D.tolist(), "spectral_abscissa": self.abscissa}


@dataclass
class DStabilityReport:
    verdict: str
    method: str
    certificate: Certificate | None = None
    counterexample: Counterexample | None = None
    note: str | None = None

    def to_jsonable(self) -> dict:
        return {
            "verdict": self.verdict,
            "method": self.method,
            "certificate": None if self.certificate is None else self.certificate.to_jsonable(),
            "counterexample": (
                None if self.counterexample is None else self.counterexample.to_jsonable()
            ),
            "note": self.note,
        }


def _default_certificate_family(n: int, budget: int, rng: np.random.Generator):
    """l1, l2, linf, then positive-diagonal scalings of each.

    Diagonal scalings of absolute norms stay absolute, hence admissible;
    general scalings can lose admissibility and are not sampled here.
    """
    for p in (1.0, 2.0, np.inf):
        yield validate_norm_spec(Lp(p), dim=n)
    for _ in range(budget):
        t = np.exp(rng.uniform(np.log(0.1), np.log(10.0), n))
        for p in (1.0, 2.0, np.inf):
            yield validate_norm_spec(Scaled(np.diag(t), Lp(p)))


def certify_additive_d_stability(
    A,
    family: list[ValidatedNorm] | None = None,
    budget: int = 20,
    *,
    seed: int | np.random.Generator | None = DEFAULT_SEED,
) -> DStabilityReport:
    """Sufficiency search: mu(A) < 0 under an admissible measure proves
    additive D-stability, since mu(A - D) <= mu(A) + mu(-D) <= mu(A).

    Family members must have an exact measure path. Inadmissible members
    are skipped (counted in the note). First certificate wins.
    """
    A = as_square_matrix(A)
    n = A.shape[0]
    rng = as_rng(seed)
    members = family if family is not None else _default_certificate_family(n, budget, rng)

    skipped = 0
    for norm in members:
        if norm.route == "estimated":
            raise NoExactPath("certificate family members need an exact measure path")
        if not is_admissible_measure(norm, budget=24, seed=rng).admissible:
            skipped += 1
            continue
        mu = matrix_measure(A, norm).value
        if mu < -ADMISSIBILITY_TOL:
            return DStabilityReport(
                "stable",
                "admissible_certificate",
                certificate=Certificate(norm, mu),
                note=f"skipped {skipped} inadmissible family member(s)" if skipped else None,
            )
    return DStabilityReport(
        "unknown",
        "budget_exhausted",
        note=f"skipped {skipped} inadmissible family member(s)" if skipped else None,
    )


def falsify_additive_d_stability(
    A,
    budget: int = 10_000,
    *,
    seed: int | np.random.Generator | None = DEFAULT_SEED,
) -> np.ndarray | None:
    """Search for nonnegative diagonal D with spectral_abscissa(A-D) > 1e-6.

    Multi-start coordinate pattern search on [0, d_max]^n with
    d_max = 10 (1 + ||A||_inf); structured starts (origin, single-axis and
    all-but-one-axis corners, full corner) come before random ones. The
    first D crossing the threshold is returned; None means the budget ran
    out, which proves nothing.
    """
    A = as_square_matrix(A)
    n = A.shape[0]
    d_max = 10.0 * (1.0 + float(np.abs(A).sum(axis=1).max()))
    rng = as_rng(seed)

    evals = 0

    def abscissa_at(d: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        return spectral_abscissa(A - np.diag(d))

    def structured_starts():
        yield np.zeros(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = d_max
            yield e
        for i in range(n):
            e = np.full(n, d_max)
            e[i] = 0.0
            yield e
        yield np.full(n, d_max)
        while True:
            yield rng.uniform(0.0, d_max, n)

    for start in structured_starts():
        if evals >= budget:
            return None
        d = start.copy()
        best = abscissa_at(d)
        if best > FALSIFY_THRESHOLD:
            return np.diag(d)
        step = d_max / 4.0
        while step > d_max * 1e-6 and evals < budget:
            improved = False
            for i in range(n):
                for sgn in (1.0, -1.0):
                    trial = d.copy()
                    trial[i] = min(max(d[i] + sgn * step, 0.0), d_max)
                    if trial[i] == d[i]:
                        continue
                    if evals >= budget:
                        return None
                    a = abscissa_at(trial)
                    if a > FALSIFY_THRESHOLD:
                        return np.diag(trial)
                    if a > best + 1e-12:
                        best, d, improved = a, trial, True
            if not improved:
                step /= 2.0
    return None


def falsify_on_grid(
    A,
    d_max: float = 10.0,
    grid: int = 50,
    extra: int = 1000,
    *,
    seed: int | np.random.Generator | None = DEFAULT_SEED,
) -> np.ndarray | None:
    """Grid sweep over D in [0, d_max]^n (mesh for n=2, random beyond),
    plus `extra` random points. Returns the first destabilizing D found."""
    A = as_square_matrix(A)
    n = A.shape[0]
    rng = as_rng(seed)
    if n == 2:
        axis = np.linspace(0.0, d_max, grid)
        g1, g2 = np.meshgrid(axis, axis, indexing="ij")
        pts = np.column_stack([g1.ravel(), g2.ravel()])
    else:
        pts = rng.uniform(0.0, d_max, (grid * grid, n))
    if extra:
        pts = np.vstack([pts, rng.uniform(0.0, d_max, (extra, n))])

    idx = np.arange(n)
    B = np.broadcast_to(A, (pts.shape[0], n, n)).copy()
    B[:, idx, idx] -= pts
    s = np.linalg.eigvals(B).real.max(axis=1)
    hits = np.nonzero(s > FALSIFY_THRESHOLD)[0]
    if hits.size:
        return np.diag(pts[hits[0]])
    return None


def _destabilizer_2x2(A: np.ndarray) -> tuple[np.ndarray, str | None]:
    """Constructive counterexample for a 2x2 matrix failing the exact test."""
    s0 = spectral_abscissa(A)
    if s0 > FALSIFY_THRESHOLD:
        return np.zeros((2, 2)), None
    det = float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    # det(A - diag(0,t)) = det(A) - t a_11 goes negative along the ray
    if A[0, 0] > 0:
        t = 2.0 * max(1.0, det / float(A[0, 0]))
        return np.diag([0.0, t]), None
    if A[1, 1] > 0:
        t = 2.0 * max(1.0, det / float(A[1, 1]))
        return np.diag([t, 0.0]), None
    return np.zeros((2, 2)), (
        "marginal case: A is not Hurwitz at D=0, but no nonnegative diagonal "
        "shift produces a strictly positive abscissa"
    )


def additive_d_stability_report(
    A,
    *,
    family: list[ValidatedNorm] | None = None,
    budget: int = 20,
    falsify_budget: int = 10_000,
    seed: int | np.random.Generator | None = DEFAULT_SEED,
) -> DStabilityReport:
    """Composite pipeline: exact 2x2 test, Metzler reduction, certificate
    search, falsifier, in that order. Verdicts are never upgraded on the
    strength of a failed search."""
    A = as_square_matrix(A)
    n = A.shape[0]

    if n == 2:
        if additive_d_stable_2x2(A):
            note = None
            if A[0, 0] == 0.0 or A[1, 1] == 0.0:
                note = (
                    "a diagonal entry is zero: additively D-stable, but no "
                    "admissible-measure certificate can exist for this matrix"
                )
            return DStabilityReport("stable", "exact_2x2", note=note)
        D, note = _destabilizer_2x2(A)
        s = spectral_abscissa(A - D)
        return DStabilityReport(
            "unstable", "exact_2x2", counterexample=Counterexample(D, s), note=note
        )

    off = A[~np.eye(n, dtype=bool)]
    if np.all(off >= 0.0):
        if additive_d_stable_metzler(A):
            return DStabilityReport("stable", "metzler")
        s0 = spectral_abscissa(A)
        return DStabilityReport(
            "unstable", "metzler", counterexample=Counterexample(np.zeros((n, n)), s0)
        )

    report = certify_additive_d_stability(A, family, budget, seed=seed)
    if report.verdict == "stable":
        return report

    D = falsify_additive_d_stability(A, falsify_budget, seed=seed)
    if D is not None:
        return DStabilityReport(
            "unstable", "falsified", counterexample=Counterexample(D, spectral_abscissa(A - D))
        )
    return DStabilityReport("unknown", "budget_exhausted", note=report.note)
