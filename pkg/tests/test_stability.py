"""Admissible measures, perturbation bounds, and additive D-stability."""

import numpy as np
import pytest

from logmeasure import (
    CERTIFIABLE_MATRIX,
    FRAGILE_MATRIX,
    Lp,
    Marginal,
    NotAdmissibleWarning,
    NotMetzler,
    NotOrthantMonotonic,
    WrongDimension,
    additive_d_stability_report,
    additive_d_stable_2x2,
    additive_d_stable_metzler,
    builtin_battery,
    certify_additive_d_stability,
    diagonal_negativity_check,
    falsify_additive_d_stability,
    falsify_on_grid,
    is_admissible_measure,
    is_hurwitz,
    matrix_measure,
    measure_of_diagonal,
    perturbation_bounds,
    spectral_abscissa,
    validate_norm_spec,
)

VIOLATION_TOL = 1e-6
RNG = np.random.default_rng(77)

BATTERY = dict(builtin_battery())
TRACE_KEYS = {
    "orthant_monotonic",
    "negated_diagonal_measure",
    "diagonal_measure_identity",
    "uniform_margin",
}


# ------------------------------------------------------------------ hurwitz


def test_is_hurwitz():
    assert is_hurwitz(FRAGILE_MATRIX)
    assert is_hurwitz(CERTIFIABLE_MATRIX)
    assert not is_hurwitz(np.array([[0.5, 0.0], [0.0, -1.0]]))
    with pytest.raises(Marginal):
        is_hurwitz(np.array([[0.0, 1.0], [-1.0, 0.0]]))


# ------------------------------------------------------------- admissibility


def test_battery_admissibility_pattern():
    for name, norm in BATTERY.items():
        v = is_admissible_measure(norm, seed=0)
        expected = name not in ("parallelogram", "sheared_linf")
        assert v.admissible is expected, name
        assert v.exact, name
        assert set(v.equivalence_trace) == TRACE_KEYS, name


def test_admissibility_counterexamples_reverify():
    for name in ("parallelogram", "sheared_linf"):
        norm = BATTERY[name]
        v = is_admissible_measure(norm, seed=0)
        D = v.counterexample_D
        assert D is not None
        assert np.all(np.diag(D) >= 0.0)
        # the point of the counterexample: mu(-D) should be <= 0 and is not
        assert matrix_measure(-D, norm).value > VIOLATION_TOL


def test_sheared_counterexample_frozen():
    v = is_admissible_measure(BATTERY["sheared_linf"], seed=0)
    assert np.array_equal(v.counterexample_D, np.diag([1.0, 2.0]))
    assert matrix_measure(-v.counterexample_D, BATTERY["sheared_linf"]).value == pytest.approx(
        3.0, abs=1e-9
    )


def test_inadmissible_norms_fail_every_equivalent_condition():
    # one violated condition propagates to all four, each with a witness
    v = is_admissible_measure(BATTERY["parallelogram"], seed=0)
    for key in TRACE_KEYS:
        t = v.equivalence_trace[key]
        assert not t.holds, key
        assert t.exact, key
        assert t.witness is not None, key


def test_plain_lp_admissible_structurally():
    v = is_admissible_measure(validate_norm_spec(Lp(3.0), dim=4), seed=0)
    assert v.admissible and v.exact
    assert v.equivalence_trace["orthant_monotonic"].exact
    # the numeric conditions were not sampled, only implied
    assert v.equivalence_trace["negated_diagonal_measure"].checks_run == 0


# ------------------------------------------------------- diagonal shortcuts


def test_measure_of_diagonal_values():
    l1 = BATTERY["l1"]
    assert measure_of_diagonal(l1, np.diag([-2.0, 5.0])) == 5.0
    assert measure_of_diagonal(l1, np.zeros((2, 2))) == 0.0
    hexagon = BATTERY["hexagon"]
    assert measure_of_diagonal(hexagon, np.diag([1.0, 2.0])) == pytest.approx(2.0, abs=1e-9)


def test_measure_of_diagonal_warns_when_identity_unavailable():
    with pytest.warns(NotAdmissibleWarning):
        value = measure_of_diagonal(BATTERY["sheared_linf"], np.diag([1.0, 2.0]))
    assert value == pytest.approx(7.0, abs=1e-9)


def test_diagonal_negativity_check():
    rep = diagonal_negativity_check(CERTIFIABLE_MATRIX, BATTERY["l2"])
    assert rep.diag_ok
    assert rep.mu == pytest.approx((-3.0 + np.sqrt(5.0)) / 2.0, abs=1e-12)
    rep2 = diagonal_negativity_check(FRAGILE_MATRIX, BATTERY["linf"])
    assert rep2.mu == 4.0


# -------------------------------------------------------- perturbation bounds


def test_perturbation_bounds_frozen():
    linf = BATTERY["linf"]
    lo, hi, exact = perturbation_bounds(np.zeros((2, 2)), np.diag([1.0, 3.0]), linf)
    assert (lo, hi, exact) == (-3.0, -1.0, -1.0)
    lo, hi, exact = perturbation_bounds(FRAGILE_MATRIX, 2.0 * np.eye(2), linf)
    # a uniform shift is captured exactly, so the bounds pinch
    assert (lo, hi, exact) == (2.0, 2.0, 2.0)


def test_perturbation_bounds_contain_exact_value():
    for norm in (BATTERY["l1"], BATTERY["l2"], BATTERY["linf"]):
        for _ in range(30):
            A = RNG.standard_normal((2, 2)) * 3.0
            D = np.diag(RNG.uniform(0.0, 5.0, size=2))
            lo, hi, exact = perturbation_bounds(A, D, norm)
            assert lo - 1e-9 <= exact <= hi + 1e-9


def test_perturbation_bounds_reject_bad_norms():
    with pytest.raises(NotOrthantMonotonic):
        perturbation_bounds(FRAGILE_MATRIX, np.eye(2), BATTERY["sheared_linf"])


# ----------------------------------------------------------- exact 2x2 path


def test_2x2_criterion():
    assert not additive_d_stable_2x2(FRAGILE_MATRIX)
    assert additive_d_stable_2x2(CERTIFIABLE_MATRIX)
    # zero diagonal entry is allowed by the criterion
    assert additive_d_stable_2x2(np.array([[0.0, -1.0], [1.0, -1.0]]))
    with pytest.raises(WrongDimension):
        additive_d_stable_2x2(np.eye(3))


def test_report_fragile():
    rep = additive_d_stability_report(FRAGILE_MATRIX, seed=0)
    assert rep.verdict == "unstable"
    assert rep.method == "exact_2x2"
    D = rep.counterexample.D
    assert np.array_equal(D, np.diag([0.0, 2.0]))
    assert rep.counterexample.abscissa == pytest.approx(0.3027756377319946, abs=1e-9)
    assert spectral_abscissa(FRAGILE_MATRIX - D) == pytest.approx(
        rep.counterexample.abscissa, abs=1e-9
    )


def test_report_certifiable_uses_exact_path():
    rep = additive_d_stability_report(CERTIFIABLE_MATRIX, seed=0)
    assert rep.verdict == "stable"
    assert rep.method == "exact_2x2"


def test_report_flags_zero_diagonal_edge():
    rep = additive_d_stability_report(np.array([[0.0, -1.0], [1.0, -1.0]]), seed=0)
    assert rep.verdict == "stable"
    assert rep.note is not None and "zero" in rep.note


def test_report_marginal_matrix():
    rep = additive_d_stability_report(np.array([[0.0, 1.0], [-1.0, 0.0]]), seed=0)
    assert rep.verdict == "unstable"
    assert np.array_equal(rep.counterexample.D, np.zeros((2, 2)))
    assert rep.note is not None and "marginal" in rep.note


# -------------------------------------------------------------- metzler path


def test_metzler_criterion():
    M = np.array([[-2.0, 1.0, 0.0], [1.0, -2.0, 1.0], [0.0, 1.0, -2.0]])
    assert additive_d_stable_metzler(M)
    Mu = np.array([[-1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0]])
    assert not additive_d_stable_metzler(Mu)
    with pytest.raises(NotMetzler):
        additive_d_stable_metzler(np.array([[-1.0, -0.5], [0.0, -1.0]]))


def test_report_metzler_paths():
    M = np.array([[-2.0, 1.0, 0.0], [1.0, -2.0, 1.0], [0.0, 1.0, -2.0]])
    rep = additive_d_stability_report(M, seed=0)
    assert (rep.verdict, rep.method) == ("stable", "metzler")
    Mu = np.array([[-1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0]])
    rep2 = additive_d_stability_report(Mu, seed=0)
    assert (rep2.verdict, rep2.method) == ("unstable", "metzler")
    # an unstable Metzler matrix is already unstable with no shift at all
    assert np.array_equal(rep2.counterexample.D, np.zeros((3, 3)))
    assert rep2.counterexample.abscissa == pytest.approx(1.0, abs=1e-9)


# ------------------------------------------------------- certify and falsify


def test_certify_finds_euclidean_certificate():
    cert = certify_additive_d_stability(CERTIFIABLE_MATRIX, seed=0)
    assert cert.verdict == "stable"
    assert cert.method == "admissible_certificate"
    assert cert.certificate.mu == pytest.approx((-3.0 + np.sqrt(5.0)) / 2.0, abs=1e-12)


def test_certificate_blocks_all_diagonal_shifts():
    cert = certify_additive_d_stability(CERTIFIABLE_MATRIX, seed=0)
    norm = cert.certificate.norm
    for _ in range(50):
        D = np.diag(RNG.uniform(0.0, 10.0, size=2))
        assert spectral_abscissa(CERTIFIABLE_MATRIX - D) <= cert.certificate.mu + 1e-9


def test_falsify_fragile():
    D = falsify_additive_d_stability(FRAGILE_MATRIX, seed=0)
    assert D is not None
    assert np.all(np.diag(D) >= 0.0)
    assert spectral_abscissa(FRAGILE_MATRIX - D) > VIOLATION_TOL
    # the known destabilizing direction: only the second state is damped
    assert np.diag(D)[0] == 0.0 and np.diag(D)[1] > 1.0


def test_falsify_on_grid_fragile():
    D = falsify_on_grid(FRAGILE_MATRIX, seed=0)
    assert D is not None
    assert spectral_abscissa(FRAGILE_MATRIX - D) > VIOLATION_TOL


def test_falsify_gives_up_on_stable_matrix():
    assert falsify_additive_d_stability(CERTIFIABLE_MATRIX, budget=100, seed=0) is None
    assert falsify_on_grid(CERTIFIABLE_MATRIX, grid=20, extra=100, seed=0) is None


def test_report_3x3_certificate_path():
    A = np.array([[-1.0, -3.0, 0.0], [1.0, -2.0, 0.0], [0.0, 0.0, -1.0]])
    rep = additive_d_stability_report(A, seed=0)
    assert rep.verdict == "stable"
    assert rep.method == "admissible_certificate"
    assert rep.certificate.mu < 0.0


def test_report_unknown_when_budgets_run_out():
    # D-stable (block triangular, rotation block has a zero diagonal entry)
    # so the falsifier cannot win, and the zero diagonal entry blocks every
    # admissible-measure certificate
    A = np.array([[0.0, -1.0, 0.0], [1.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
    rep = additive_d_stability_report(A, budget=6, falsify_budget=300, seed=0)
    assert rep.verdict == "unknown"
    assert rep.method == "budget_exhausted"


def test_report_json_shape():
    doc = additive_d_stability_report(FRAGILE_MATRIX, seed=0).to_jsonable()
    assert doc["verdict"] == "unstable"
    assert doc["counterexample"]["D"] == [[0.0, 0.0], [0.0, 2.0]]
    assert doc["counterexample"]["spectral_abscissa"] == pytest.approx(0.302775638, abs=1e-6)


# ------------------------------------------------- criterion cross-validation


def test_2x2_criterion_against_grid_search():
    """Random integer matrices: the closed-form verdict must agree with a
    brute-force sweep over diagonal perturbations."""
    rng = np.random.default_rng(424242)
    checked_stable = checked_unstable = 0
    while checked_stable < 40 or checked_unstable < 40:
        A = rng.integers(-5, 6, size=(2, 2)).astype(float)
        tr = A[0, 0] + A[1, 1]
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]  # exact for integers
        hurwitz = tr < 0 and det > 0
        stable = additive_d_stable_2x2(A)
        assert stable == (hurwitz and A[0, 0] <= 0 and A[1, 1] <= 0)
        if stable and checked_stable < 40:
            assert falsify_on_grid(A, d_max=40.0, grid=25, extra=200, seed=1) is None
            checked_stable += 1
        elif hurwitz and not stable and checked_unstable < 40:
            # Hurwitz but a positive diagonal entry: a destabilizer exists
            D = falsify_on_grid(A, d_max=40.0, grid=25, extra=200, seed=1)
            assert D is not None
            assert spectral_abscissa(A - D) > VIOLATION_TOL
            checked_unstable += 1


def test_report_counterexamples_always_reverify():
    rng = np.random.default_rng(31337)
    for _ in range(300):
        A = rng.integers(-5, 6, size=(2, 2)).astype(float)
        rep = additive_d_stability_report(A, seed=0)
        if rep.verdict == "unstable" and rep.note is None:
            assert spectral_abscissa(A - rep.counterexample.D) > VIOLATION_TOL
        elif rep.verdict == "unstable":
            # marginal case: the matrix fails at D = 0 without a strict margin
            assert spectral_abscissa(A) >= -1e-9
