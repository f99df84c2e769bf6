import math

import numpy as np
import pytest

from ionbound.beta import (
    TRIAL_MEASURE_ANALYTIC,
    BetaSettings,
    RadialMeasure,
    beta_bracket,
    default_nodes,
    g_of_lambda,
    maximize_g,
    minimize_radial_ratio,
    project_to_simplex,
    radial_ratio,
    trial_measure_value,
    trial_weights_on_nodes,
    w_maximin,
)
from ionbound.errors import DegenerateGridError, DomainError


# ---------------------------------------------------------------------------
# g(lambda)
# ---------------------------------------------------------------------------

def test_g_at_0843_matches_reference():
    point = g_of_lambda(0.843)
    assert point.g == pytest.approx(0.821804, abs=1e-6)


def test_g_at_endpoint_one():
    point = g_of_lambda(1.0)
    assert point.lambda_prime == pytest.approx(1.0, abs=1e-15)
    assert point.g == pytest.approx(0.0, abs=1e-15)


def test_g_defining_equation_residual_on_grid():
    for lam in np.linspace(0.8, 1.0, 500):
        point = g_of_lambda(float(lam))
        assert abs(point.residual()) < 1e-10
        assert point.lambda_prime <= point.lam + 1e-12


def test_g_domain():
    with pytest.raises(DomainError):
        g_of_lambda(0.79)
    with pytest.raises(DomainError):
        g_of_lambda(1.01)


def test_maximize_g():
    lam0, g_max = maximize_g(1e-8)
    assert lam0 == pytest.approx(0.843476, abs=1e-5)
    assert g_max == pytest.approx(0.8218066, abs=1e-6)
    assert g_max > 0.8218
    # grid oracle for maximality
    grid = np.linspace(0.8, 1.0, 10**4)
    assert g_max >= max(g_of_lambda(float(l)).g for l in grid) - 1e-10
    with pytest.raises(DomainError):
        maximize_g(0.0)


# ---------------------------------------------------------------------------
# maximin grid search
# ---------------------------------------------------------------------------

def test_w_maximin_coarse_grid():
    result = w_maximin(51, 101, 101)
    assert 0.8218 <= result.value <= 0.83
    _, g_max = maximize_g(1e-10)
    assert result.value >= g_max - result.grid_error
    assert 0.8 <= result.lambda_at_max <= 1.0


def test_w_maximin_lambda_one_row():
    """With the blend fully on the first kernel, (b=0, c=1) caps the row min at 1."""
    from ionbound.beta import _inner_min_over_bc

    row = _inner_min_over_bc(np.array([1.0]), 101, 101)
    assert row[0] <= 1.0 + 1e-15


def test_w_maximin_refinement_decreases_inner_min():
    from ionbound.beta import _inner_min_over_bc

    lams = np.linspace(0.8, 1.0, 11)
    coarse = _inner_min_over_bc(lams, 41, 41)
    fine = _inner_min_over_bc(lams, 81, 81)
    assert np.all(fine <= coarse + 1e-15)


def test_w_maximin_degenerate_grid():
    with pytest.raises(DegenerateGridError):
        w_maximin(1, 101, 101)


# ---------------------------------------------------------------------------
# radial ratio and trial measure
# ---------------------------------------------------------------------------

def test_radial_ratio_single_node():
    assert radial_ratio(RadialMeasure([1.0], [1.0])) == pytest.approx(1.0)


def test_radial_ratio_two_nodes_hand_expanded():
    measure = RadialMeasure([1.0, 2.0], [0.5, 0.5])
    assert radial_ratio(measure) == pytest.approx(11 / 12, rel=1e-14)


def test_radial_ratio_dilation_invariance():
    rng = np.random.default_rng(6)
    nodes = np.sort(rng.uniform(0.1, 10.0, size=12))
    weights = rng.uniform(0.0, 1.0, size=12)
    weights /= weights.sum()
    measure = RadialMeasure(nodes, weights)
    base = radial_ratio(measure)
    for t in (10.0, 0.037, 3.5):
        assert radial_ratio(measure.dilated(t)) == pytest.approx(base, rel=1e-12)


def test_radial_ratio_permutation_after_sorting():
    rng = np.random.default_rng(9)
    nodes = np.sort(rng.uniform(0.1, 10.0, size=8))
    weights = rng.uniform(0.1, 1.0, size=8)
    weights /= weights.sum()
    base = radial_ratio(RadialMeasure(nodes, weights))
    perm = rng.permutation(8)
    order = np.argsort(nodes[perm])
    again = radial_ratio(RadialMeasure(nodes[perm][order], weights[perm][order]))
    assert again == pytest.approx(base, rel=1e-12)


def test_radial_measure_invariants():
    with pytest.raises(DomainError):
        RadialMeasure([1.0, 0.5], [0.5, 0.5])
    with pytest.raises(DomainError):
        RadialMeasure([1.0, 2.0], [0.6, 0.6])
    with pytest.raises(DomainError):
        RadialMeasure([-1.0, 2.0], [0.5, 0.5])


def test_trial_measure_analytic_value():
    value = trial_measure_value(2048)
    assert value.analytic == pytest.approx(115 / 81 - math.log(3) / 2, rel=1e-15)
    assert value.analytic == pytest.approx(0.8704, abs=5e-5)
    assert value.analytic == pytest.approx(0.8704469, abs=1e-7)


def test_trial_measure_quadrature():
    value = trial_measure_value(2048)
    assert value.quadrature == pytest.approx(value.analytic, abs=1e-6)
    assert value.normalization == pytest.approx(1.0, abs=1e-10)


def test_trial_measure_quadrature_converges():
    errors = [
        abs(trial_measure_value(n).quadrature - TRIAL_MEASURE_ANALYTIC)
        for n in (128, 256, 512, 1024, 2048, 4096)
    ]
    for a, b in zip(errors, errors[1:]):
        assert b <= a + 1e-12


def test_trial_measure_domain():
    with pytest.raises(DomainError):
        trial_measure_value(8)


# ---------------------------------------------------------------------------
# simplex projection
# ---------------------------------------------------------------------------

def _project_by_bisection(v: np.ndarray) -> np.ndarray:
    """Independent oracle: solve for the shift tau with sum(max(v+tau,0)) = 1."""
    lo, hi = -v.max() + 1.0 / v.size - 1.0, -v.max() + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.maximum(v + mid, 0.0).sum() > 1.0:
            hi = mid
        else:
            lo = mid
    return np.maximum(v + 0.5 * (lo + hi), 0.0)


def test_simplex_projection_against_bisection_oracle():
    rng = np.random.default_rng(14)
    for _ in range(50):
        v = rng.standard_normal(int(rng.integers(2, 30))) * 3.0
        w = project_to_simplex(v)
        assert w.min() >= 0.0
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(w, _project_by_bisection(v), atol=1e-9)


def test_simplex_projection_fixed_point():
    w = np.array([0.2, 0.3, 0.5])
    np.testing.assert_allclose(project_to_simplex(w), w, atol=1e-12)


# ---------------------------------------------------------------------------
# radial minimization and the bracket
# ---------------------------------------------------------------------------

def test_minimize_single_node_is_forced():
    measure, value = minimize_radial_ratio(np.array([2.5]))
    assert value == pytest.approx(1.0)
    assert measure.weights[0] == pytest.approx(1.0)


def test_minimize_radial_ratio_default_grid(radial_minimum_default):
    measure, value, history, _ = radial_minimum_default
    assert value == pytest.approx(0.8702, abs=5e-4)
    _, g_max = maximize_g(1e-10)
    assert value >= g_max - 1e-4
    assert value <= TRIAL_MEASURE_ANALYTIC + 1e-4
    # minimizer beats the feasible warm start
    nodes = default_nodes()
    start = RadialMeasure(nodes, trial_weights_on_nodes(nodes))
    assert value <= radial_ratio(start) + 1e-9
    assert value == pytest.approx(radial_ratio(measure), abs=1e-12)


def test_dinkelbach_history_monotone(radial_minimum_default):
    _, value, history, _ = radial_minimum_default
    assert all(b <= a + 1e-15 for a, b in zip(history, history[1:]))
    assert history[-1] == pytest.approx(value, abs=1e-12)


def test_beta_bracket_defaults(radial_minimum_default):
    bracket = beta_bracket()
    assert bracket.lower == pytest.approx(0.8218066, abs=1e-6)
    assert bracket.lower >= 0.8218 - 1e-4
    assert bracket.upper < 0.8705
    assert bracket.lower <= bracket.upper
    assert bracket.lower_source in ("g_max", "maximin-grid")
    assert bracket.upper_source in ("trial-measure", "optimized-measure")
    _, value, _, _ = radial_minimum_default
    assert bracket.upper == pytest.approx(min(TRIAL_MEASURE_ANALYTIC, value), abs=1e-9)
    if bracket.upper_source == "optimized-measure":
        assert bracket.certificate_measure is not None
        assert radial_ratio(bracket.certificate_measure) == pytest.approx(
            bracket.upper, abs=1e-12
        )


def test_bracket_sandwich_g_below_radial(radial_minimum_default):
    _, radial_value, _, _ = radial_minimum_default
    _, g_max = maximize_g(1e-10)
    assert g_max <= radial_value


def test_dinkelbach_iteration_limit_carries_best():
    from ionbound.beta import BetaBracket
    from ionbound.errors import InconsistentBracketError, IterationLimitError

    # a zero tolerance can never be met, so the outer cap must trip
    settings = BetaSettings(node_count=20, outer_iterations=2, dinkelbach_tolerance=0.0)
    with pytest.raises(IterationLimitError) as info:
        minimize_radial_ratio(settings=settings)
    measure, value = info.value.best
    assert isinstance(measure, RadialMeasure)
    assert 0.8 < value < 1.1

    with pytest.raises(InconsistentBracketError):
        BetaBracket(lower=0.9, lower_source="g_max", upper=0.8, upper_source="trial-measure")
