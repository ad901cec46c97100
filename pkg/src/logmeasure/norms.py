"""Vector norm specifications, validation, evaluation, and ball geometry.

Supported families:

* ``Lp(p)`` for p in [1, inf],
* ``Scaled(T, inner)`` meaning ``|x| = inner(T x)`` for nonsingular T,
* ``Polyhedral(vertices)``, the Minkowski gauge of a centrally symmetric
  polytope given by its vertices,
* ``PiecewiseOrthant(cases)``, one inner norm per closed orthant, glued
  continuously along the coordinate hyperplanes.

``validate_norm_spec`` turns a raw spec into a ``ValidatedNorm`` carrying the
dimension, cached geometry (polytope extreme points, facet normals, angular
order in 2-D), and the analysis route used by the matrix-level operations.
Piecewise specifications are validated by seeded sampling (boundary
agreement, cross-orthant midpoint convexity, symmetry), so their acceptance
is probabilistic: a spec that passes is a norm with high confidence, and the
exact polytope reconstruction in dimensions <= 3 re-checks the geometry.

All functions are pure; ValidatedNorm instances are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from .common import DEFAULT_SEED, TOL_VERTEX, as_rng, as_vector
from .errors import (
    DegenerateBall,
    DimensionMismatch,
    NotCentrallySymmetric,
    NotConvex,
    NotPolyhedral,
    SingularScaling,
    UnsupportedDimension,
    ValidationError,
)

# Enumerating the l-inf ball (or sign diagonals) costs 2**n; beyond this cap
# the package refuses rather than exhausting memory.
MAX_SIGN_ENUM_DIM = 16

# PiecewiseOrthant needs one case per orthant, 2**n of them.
MAX_PIECEWISE_DIM = 12

# Exact polytope reconstruction for piecewise norms stops here.
MAX_PIECEWISE_VERTEX_DIM = 3


@dataclass(frozen=True, eq=False)
class Lp:
    """The l_p norm; p may be math.inf. Dimension-free until bound."""

    p: float


@dataclass(frozen=True, eq=False)
class Scaled:
    """|x| = inner(T x) for a nonsingular square matrix T."""

    T: np.ndarray
    inner: "NormSpec"


@dataclass(frozen=True, eq=False)
class Polyhedral:
    """Gauge of the centrally symmetric polytope conv(vertices)."""

    vertices: np.ndarray


@dataclass(frozen=True, eq=False)
class PiecewiseOrthant:
    """One inner norm per orthant, keyed by sign strings like '+-'."""

    cases: Mapping[str, "NormSpec"]


NormSpec = Union[Lp, Scaled, Polyhedral, PiecewiseOrthant]


def _dedup_rows(V: np.ndarray, tol: float) -> np.ndarray:
    keep: list[int] = []
    for i in range(V.shape[0]):
        if not any(np.max(np.abs(V[i] - V[k])) <= tol for k in keep):
            keep.append(i)
    return V[keep]


def _check_symmetric(V: np.ndarray, tol: float) -> None:
    for v in V:
        if not any(np.max(np.abs(v + w)) <= tol for w in V):
            raise NotCentrallySymmetric(f"vertex {v.tolist()} has no antipode in the set")


def _extreme_points(V: np.ndarray) -> np.ndarray:
    """Extreme points of conv(V), requiring a full-dimensional hull."""
    n = V.shape[1]
    if n == 1:
        a = float(np.max(V[:, 0]))
        b = float(np.min(V[:, 0]))
        return np.array([[b], [a]])
    try:
        hull = ConvexHull(V)
    except QhullError as exc:
        raise DegenerateBall(f"vertex set does not span a full-dimensional ball: {exc}") from exc
    idx = sorted(set(int(i) for i in hull.vertices))
    return V[idx]


def _canonical_row_order(V: np.ndarray) -> np.ndarray:
    order = np.lexsort(V.T[::-1])
    return V[order]


class _PolytopeGauge:
    """Exact gauge of a full-dimensional symmetric polytope.

    2-D uses the angular sector of the query and solves the 2x2 cone system
    exactly; higher dimensions use cached facet normals, so each evaluation
    is a max of linear functionals.
    """

    def __init__(self, vertices: np.ndarray):
        self.vertices = vertices
        self.dim = vertices.shape[1]
        if self.dim == 1:
            self.scale = float(np.max(np.abs(vertices)))
            return
        if self.dim == 2:
            ang = np.arctan2(vertices[:, 1], vertices[:, 0])
            order = np.argsort(ang)
            self.sorted_vertices = vertices[order]
            self.angles = ang[order]
            if np.min(np.diff(self.angles, append=self.angles[0] + 2 * np.pi)) <= 0:
                raise DegenerateBall("two extreme points on a common ray")
            return
        hull = ConvexHull(vertices)
        eq = hull.equations
        offsets = -eq[:, -1]
        if np.any(offsets <= 0):
            raise DegenerateBall("origin is not interior to the ball")
        self.facet_normals = eq[:, :-1] / offsets[:, None]

    def gauge_many(self, X: np.ndarray) -> np.ndarray:
        if self.dim == 1:
            return np.abs(X[:, 0]) / self.scale
        if self.dim == 2:
            V = self.sorted_vertices
            m = V.shape[0]
            th = np.arctan2(X[:, 1], X[:, 0])
            idx = np.searchsorted(self.angles, th, side="right") - 1
            idx = np.where(idx < 0, m - 1, idx)
            v1 = V[idx]
            v2 = V[(idx + 1) % m]
            det = v1[:, 0] * v2[:, 1] - v2[:, 0] * v1[:, 1]
            a = (X[:, 0] * v2[:, 1] - v2[:, 0] * X[:, 1]) / det
            b = (v1[:, 0] * X[:, 1] - X[:, 0] * v1[:, 1]) / det
            return a + b
        return np.maximum((X @ self.facet_normals.T).max(axis=1), 0.0)


def _lp_eval_many(p: float, X: np.ndarray) -> np.ndarray:
    if p == math.inf:
        return np.abs(X).max(axis=1)
    if p == 1:
        return np.abs(X).sum(axis=1)
    if p == 2:
        return np.linalg.norm(X, axis=1)
    return (np.abs(X) ** p).sum(axis=1) ** (1.0 / p)


def _lp_ball_vertices(p: float, n: int) -> np.ndarray:
    if p == 1:
        return np.vstack([np.eye(n), -np.eye(n)])
    if p == math.inf:
        if n > MAX_SIGN_ENUM_DIM:
            raise UnsupportedDimension(
                f"l-inf ball has 2**{n} vertices; enumeration capped at n={MAX_SIGN_ENUM_DIM}"
            )
        return np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    raise NotPolyhedral(f"the l_{p} ball is not a polytope")


def _orthant_index(signs: str) -> int:
    return sum(1 << i for i, c in enumerate(signs) if c == "-")


def _pattern_indices(X: np.ndarray) -> np.ndarray:
    """Orthant index per row; zero coordinates count as '+'."""
    neg = X < 0
    weights = 1 << np.arange(X.shape[1])
    return (neg * weights).sum(axis=1)


class ValidatedNorm:
    """A checked norm specification with cached geometry and analysis route.

    route is one of:

    * ``'closed'``        bare l_1 / l_2 / l_inf,
    * ``'scaled_closed'`` an l_1 / l_2 / l_inf norm behind a nonsingular
      change of coordinates (possibly a collapsed chain of scalings),
    * ``'polyhedral'``    the unit ball is a polytope with known extreme
      points (polyhedral specs, scaled polyhedral, reducible piecewise),
    * ``'estimated'``     no exact matrix-level route (generic l_p, scaled
      generic l_p, piecewise beyond the reconstruction cap).

    Build instances with :func:`validate_norm_spec`.
    """

    def __init__(
        self,
        spec: NormSpec,
        dim: int | None,
        kind: str,
        *,
        p: float | None = None,
        inner: "ValidatedNorm | None" = None,
        T: np.ndarray | None = None,
        cases: "dict[str, ValidatedNorm] | None" = None,
        gauge: _PolytopeGauge | None = None,
        ball_vertices: np.ndarray | None = None,
        vertex_error: Exception | None = None,
        flat_T: np.ndarray | None = None,
        core_p: float | None = None,
    ):
        self.spec = spec
        self.dim = dim
        self.kind = kind
        self.p = p
        self.inner = inner
        self.T = T
        self.cases = cases
        self._gauge = gauge
        self._ball_vertices = ball_vertices
        self._vertex_error = vertex_error
        self.flat_T = flat_T
        self.flat_Tinv = np.linalg.inv(flat_T) if flat_T is not None else None
        self.core_p = core_p
        if cases is not None:
            self._case_table = {_orthant_index(k): v for k, v in cases.items()}
        self.route = self._compute_route()

    def _compute_route(self) -> str:
        if self.kind == "lp":
            return "closed" if self.p in (1.0, 2.0, math.inf) else "estimated"
        if self.kind == "scaled":
            if self.core_p in (1.0, 2.0, math.inf):
                return "scaled_closed"
            if self._ball_vertices is not None:
                return "polyhedral"
            return "estimated"
        if self.kind == "polyhedral":
            return "polyhedral"
        if self._ball_vertices is not None:
            return "polyhedral"
        return "estimated"

    # -- evaluation ---------------------------------------------------

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DimensionMismatch(f"expected a (k, n) sample array, got shape {X.shape}")
        if self.dim is not None and X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {X.shape[1]}")
        if self.kind == "lp":
            return _lp_eval_many(self.p, X)
        if self.kind == "scaled":
            return self.inner.evaluate_many(X @ self.T.T)
        if self.kind == "polyhedral":
            return self._gauge.gauge_many(X)
        out = np.empty(X.shape[0])
        idx = _pattern_indices(X)
        for key in np.unique(idx):
            mask = idx == key
            out[mask] = self._case_table[key].evaluate_many(X[mask])
        return out

    def __call__(self, x) -> float:
        v = as_vector(x, self.dim)
        return float(self.evaluate_many(v[None, :])[0])

    # -- geometry -----------------------------------------------------

    @property
    def ball_vertices(self) -> np.ndarray | None:
        """Extreme points of the unit ball, or None when not available."""
        if self._ball_vertices is None and self.kind == "lp" and self.dim is not None:
            try:
                self._ball_vertices = _lp_ball_vertices(self.p, self.dim)
            except (NotPolyhedral, UnsupportedDimension) as exc:
                self._vertex_error = exc
        return self._ball_vertices

    def vertex_failure(self) -> Exception:
        """The exception explaining why ball_vertices is None."""
        if self._vertex_error is not None:
            return self._vertex_error
        if self.kind == "lp" and self.dim is None:
            return DimensionMismatch("lp spec has no bound dimension; validate with dim=...")
        return NotPolyhedral("unit ball of this spec is not available as a polytope")

    def __repr__(self) -> str:  # pragma: no cover
        return f"ValidatedNorm(kind={self.kind!r}, dim={self.dim}, route={self.route!r})"


def eval_norm(x, norm: ValidatedNorm) -> float:
    """Evaluate the norm at a vector. Exact for every supported family."""
    return norm(x)


def unit_ball_vertices(norm: ValidatedNorm) -> np.ndarray:
    """Extreme points of the unit ball as a (m, n) array.

    Raises NotPolyhedral for non-polytopal balls, UnsupportedDimension
    beyond the enumeration caps, DimensionMismatch for unbound lp specs.
    """
    V = norm.ball_vertices
    if V is None:
        raise norm.vertex_failure()
    return V.copy()


# -- validation -------------------------------------------------------


def _validate_lp(spec: Lp, dim: int | None) -> ValidatedNorm:
    p = spec.p
    if isinstance(p, str):
        raise ValidationError("p must be numeric; use math.inf for the sup norm")
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValidationError(f"lp norms need p >= 1, got {p}")
    if dim is not None and dim < 1:
        raise ValidationError("dimension must be >= 1")
    return ValidatedNorm(spec, dim, "lp", p=p)


def _validate_scaled(spec: Scaled, dim: int | None, seed, samples) -> ValidatedNorm:
    T = np.asarray(spec.T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValidationError(f"scaling matrix must be square, got shape {T.shape}")
    if not np.all(np.isfinite(T)):
        raise ValidationError("scaling matrix entries must be finite")
    n = T.shape[0]
    if dim is not None and dim != n:
        raise DimensionMismatch(f"requested dim {dim} but scaling matrix is {n}x{n}")
    sv = np.linalg.svd(T, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise SingularScaling(f"scaling matrix singular to working precision (sv ratio {sv[-1]/sv[0]:.2e})")
    inner = validate_norm_spec(spec.inner, dim=n, seed=seed, samples=samples)
    # Collapse chains of scalings: |x| = inner(T x) with inner itself scaled
    # by S around a core means core norm evaluated at (S_flat T) x.
    if inner.flat_T is not None:
        flat_T = inner.flat_T @ T
    elif inner.kind == "lp":
        flat_T = T
    else:
        flat_T = T
    core = inner
    while core.kind == "scaled":
        core = core.inner
    core_p = core.p if core.kind == "lp" else None
    verts = None
    if core.kind != "lp" or core_p in (1.0, math.inf):
        core_verts = core.ball_vertices
        if core_verts is not None:
            verts = _canonical_row_order(core_verts @ np.linalg.inv(flat_T).T)
    return ValidatedNorm(
        spec,
        n,
        "scaled",
        inner=inner,
        T=T,
        ball_vertices=verts,
        flat_T=flat_T,
        core_p=core_p,
    )


def _validate_polyhedral(spec: Polyhedral, dim: int | None) -> ValidatedNorm:
    V = np.asarray(spec.vertices, dtype=float)
    if V.ndim != 2 or V.shape[0] < 2 or V.shape[1] < 1:
        raise ValidationError(f"vertices must form a (m>=2, n>=1) array, got shape {V.shape}")
    if not np.all(np.isfinite(V)):
        raise ValidationError("vertices must be finite")
    n = V.shape[1]
    if dim is not None and dim != n:
        raise DimensionMismatch(f"requested dim {dim} but vertices live in R^{n}")
    V = _dedup_rows(V, TOL_VERTEX)
    if V.shape[0] < 2:
        raise DegenerateBall("fewer than two distinct vertices")
    _check_symmetric(V, TOL_VERTEX)
    if np.max(np.abs(V)) <= TOL_VERTEX:
        raise DegenerateBall("all vertices at the origin")
    # Interior points are dropped, not rejected: the hull (and hence the
    # gauge) is unchanged, and downstream code may assume minimality.
    V = _canonical_row_order(_extreme_points(V))
    gauge = _PolytopeGauge(V)
    return ValidatedNorm(spec, n, "polyhedral", gauge=gauge, ball_vertices=V)


def _piecewise_sampled_checks(
    cases: dict[str, ValidatedNorm], n: int, rng: np.random.Generator, samples: int
) -> None:
    table = {key: cases[key] for key in cases}

    def evaluate(X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        idx = _pattern_indices(X)
        keys = {_orthant_index(k): v for k, v in table.items()}
        for key in np.unique(idx):
            mask = idx == key
            out[mask] = keys[key].evaluate_many(X[mask])
        return out

    # Central symmetry of the glued function.
    X = rng.standard_normal((200, n))
    vx = evaluate(X)
    vmx = evaluate(-X)
    bad = np.abs(vx - vmx) > 1e-9 * (1 + np.abs(vx))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NotCentrallySymmetric(
            f"|x| != |-x| at x={X[i].tolist()} ({vx[i]:.12g} vs {vmx[i]:.12g})"
        )

    # Adjacent orthants must agree on the shared boundary, otherwise the
    # glued function is not even continuous.
    for _ in range(200):
        x = rng.standard_normal(n)
        j = int(rng.integers(n))
        x[j] = 0.0
        base = ["+" if xi >= 0 else "-" for xi in x]
        vals = []
        for cj in "+-":
            base[j] = cj
            vals.append(float(cases["".join(base)].evaluate_many(x[None, :])[0]))
        if abs(vals[0] - vals[1]) > 1e-9 * (1 + abs(vals[0])):
            raise NotConvex(
                f"orthant pieces disagree on the boundary at {x.tolist()}: "
                f"{vals[0]:.12g} vs {vals[1]:.12g}"
            )

    # Convexity across orthants, sampled at midpoints.
    k = max(samples, 1000)
    X = rng.standard_normal((k, n))
    Y = rng.standard_normal((k, n))
    different = _pattern_indices(X) != _pattern_indices(Y)
    X, Y = X[different], Y[different]
    mid = 0.5 * (X + Y)
    lhs = evaluate(mid)
    rhs = 0.5 * (evaluate(X) + evaluate(Y))
    bad = lhs > rhs + 1e-9 * (1 + rhs)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NotConvex(
            f"midpoint convexity fails between {X[i].tolist()} and {Y[i].tolist()}: "
            f"|mid|={lhs[i]:.12g} > {rhs[i]:.12g}"
        )


def _piecewise_ball_vertices(cases: dict[str, ValidatedNorm], n: int) -> np.ndarray | None:
    if n > MAX_PIECEWISE_VERTEX_DIM:
        return None
    pieces = []
    for signs, inner in cases.items():
        Vin = inner.ball_vertices
        if Vin is None:
            return None
        sigma = np.array([1.0 if c == "+" else -1.0 for c in signs])
        if n == 1:
            a = float(np.max(np.abs(Vin)))
            pieces.append(np.array([[0.0], [sigma[0] * a]]))
            continue
        hull_in = ConvexHull(Vin)
        orth = np.zeros((n, n + 1))
        orth[:, :n] = -np.diag(sigma)
        H = np.vstack([hull_in.equations, orth])
        x0 = sigma * (0.5 / float(inner.evaluate_many(sigma[None, :])[0]))
        try:
            hs = HalfspaceIntersection(H, x0)
        except QhullError as exc:
            raise DegenerateBall(f"orthant piece for {signs} is degenerate: {exc}") from exc
        pieces.append(hs.intersections)
    P = _dedup_rows(np.vstack(pieces), TOL_VERTEX)
    V = _canonical_row_order(_extreme_points(P))
    return V


def _validate_piecewise(
    spec: PiecewiseOrthant, dim: int | None, seed, samples
) -> ValidatedNorm:
    items = dict(spec.cases)
    if not items:
        raise ValidationError("piecewise spec has no cases")
    n = len(next(iter(items)))
    if dim is not None and dim != n:
        raise DimensionMismatch(f"requested dim {dim} but sign patterns have length {n}")
    if n > MAX_PIECEWISE_DIM:
        raise UnsupportedDimension(
            f"piecewise specs need 2**n cases; capped at n={MAX_PIECEWISE_DIM}"
        )
    for key in items:
        if len(key) != n or any(c not in "+-" for c in key):
            raise ValidationError(f"bad sign pattern {key!r}")
    if len(items) != 2**n:
        missing = [
            "".join(c)
            for c in itertools.product("+-", repeat=n)
            if "".join(c) not in items
        ]
        raise ValidationError(f"orthant coverage incomplete; missing {missing[:4]}")

    rng = as_rng(seed)
    cases = {
        key: validate_norm_spec(inner, dim=n, seed=seed, samples=samples)
        for key, inner in items.items()
    }
    _piecewise_sampled_checks(cases, n, rng, samples)

    verts = _piecewise_ball_vertices(cases, n)
    norm = ValidatedNorm(spec, n, "piecewise", cases=cases, ball_vertices=verts)
    if verts is not None:
        # Reconstructed extreme points must sit on the unit sphere of the
        # glued function; a gap means the pieces do not form a convex body.
        vals = norm.evaluate_many(verts)
        if np.any(np.abs(vals - 1.0) > 1e-9):
            raise NotConvex(
                "reconstructed ball extreme points are not at norm 1; "
                "the piecewise definition is not convex"
            )
        for v in verts:
            if not any(np.max(np.abs(v + w)) <= 1e-9 for w in verts):
                raise NotCentrallySymmetric("reconstructed ball is not symmetric")
    return norm


def validate_norm_spec(
    spec: NormSpec,
    *,
    dim: int | None = None,
    seed: int | np.random.Generator | None = DEFAULT_SEED,
    samples: int = 1000,
) -> ValidatedNorm:
    """Validate a norm spec and attach cached geometry and the analysis route.

    dim binds the dimension of a bare lp spec (other families carry their
    own); seed drives every sampled check, so validation is deterministic.
    """
    if isinstance(spec, Lp):
        return _validate_lp(spec, dim)
    if isinstance(spec, Scaled):
        return _validate_scaled(spec, dim, seed, samples)
    if isinstance(spec, Polyhedral):
        return _validate_polyhedral(spec, dim)
    if isinstance(spec, PiecewiseOrthant):
        return _validate_piecewise(spec, dim, seed, samples)
    raise ValidationError(f"unknown norm spec type {type(spec).__name__}")


# -- JSON interchange -------------------------------------------------


def norm_spec_from_json(obj) -> NormSpec:
    """Parse the JSON norm-spec schema into a NormSpec (no validation)."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError("norm spec JSON must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "lp":
        p = obj.get("p")
        if p == "inf":
            p = math.inf
        if not isinstance(p, (int, float)):
            raise ValidationError(f"lp spec needs numeric p or 'inf', got {p!r}")
        return Lp(float(p))
    if kind == "scaled":
        if "T" not in obj or "inner" not in obj:
            raise ValidationError("scaled spec needs 'T' and 'inner'")
        return Scaled(np.asarray(obj["T"], dtype=float), norm_spec_from_json(obj["inner"]))
    if kind == "polyhedral":
        if "vertices" not in obj:
            raise ValidationError("polyhedral spec needs 'vertices'")
        return Polyhedral(np.asarray(obj["vertices"], dtype=float))
    if kind == "piecewise_orthant":
        raw = obj.get("cases")
        if not isinstance(raw, list):
            raise ValidationError("piecewise_orthant spec needs a 'cases' list")
        cases: dict[str, NormSpec] = {}
        for entry in raw:
            if not isinstance(entry, dict) or "signs" not in entry or "inner" not in entry:
                raise ValidationError("each case needs 'signs' and 'inner'")
            signs = entry["signs"]
            if signs in cases:
                raise ValidationError(f"duplicate case for orthant {signs!r}")
            cases[signs] = norm_spec_from_json(entry["inner"])
        return PiecewiseOrthant(cases)
    raise ValidationError(f"unknown norm spec kind {kind!r}")


def norm_spec_to_json(spec: NormSpec | ValidatedNorm) -> dict:
    """Serialize a norm spec back to the JSON schema (round-trip stable)."""
    if isinstance(spec, ValidatedNorm):
        spec = spec.spec
    if isinstance(spec, Lp):
        return {"kind": "lp", "p": "inf" if spec.p == math.inf else float(spec.p)}
    if isinstance(spec, Scaled):
        return {
            "kind": "scaled",
            "T": np.asarray(spec.T, dtype=float).tolist(),
            "inner": norm_spec_to_json(spec.inner),
        }
    if isinstance(spec, Polyhedral):
        return {
            "kind": "polyhedral",
            "vertices": np.asarray(spec.vertices, dtype=float).tolist(),
        }
    if isinstance(spec, PiecewiseOrthant):
        return {
            "kind": "piecewise_orthant",
            "cases": [
                {"signs": signs, "inner": norm_spec_to_json(inner)}
                for signs, inner in sorted(spec.cases.items())
            ],
        }
    raise ValidationError(f"unknown norm spec type {type(spec).__name__}")
