import math

import numpy as np
import pytest

from conftest import random_configuration
from ionbound.alpha import (
    OptimizerSettings,
    alpha_sandwich,
    estimate_alpha,
    local_minimize,
    normalize_config,
    sandwich_default_r,
)
from ionbound.errors import DomainError
from ionbound.kernels import ParticleConfiguration, ratio_value

ANTIPODAL = ParticleConfiguration([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])


def equilateral():
    return ParticleConfiguration(
        [
            [1.0, 0.0, 0.0],
            [-0.5, math.sqrt(3) / 2, 0.0],
            [-0.5, -math.sqrt(3) / 2, 0.0],
        ]
    )


# ---------------------------------------------------------------------------
# normalize_config
# ---------------------------------------------------------------------------

def test_normalize_scales_to_n():
    cfg = normalize_config(ParticleConfiguration([[2.0, 0, 0], [-2.0, 0, 0]]))
    np.testing.assert_allclose(cfg.points, [[1, 0, 0], [-1, 0, 0]], atol=1e-15)


def test_normalize_idempotent():
    once = normalize_config(equilateral())
    twice = normalize_config(once)
    np.testing.assert_array_equal(once.points, twice.points)


def test_normalize_preserves_ratio():
    rng = np.random.default_rng(8)
    for _ in range(20):
        pts = random_configuration(rng, 5)
        cfg = ParticleConfiguration(pts)
        normalized = normalize_config(cfg)
        assert np.linalg.norm(normalized.points, axis=1).sum() == pytest.approx(
            5.0, abs=1e-12
        )
        assert ratio_value(normalized).ratio == pytest.approx(
            ratio_value(cfg).ratio, rel=1e-12
        )


# ---------------------------------------------------------------------------
# local_minimize
# ---------------------------------------------------------------------------

def test_antipodal_pair_is_a_fixed_point():
    result = local_minimize(ANTIPODAL, OptimizerSettings(seed=1))
    assert result.value.ratio == pytest.approx(0.5, abs=1e-12)
    assert result.converged


def test_descent_from_equilateral_triangle():
    result = local_minimize(equilateral(), OptimizerSettings(seed=1))
    assert result.value.ratio <= 1 / math.sqrt(3) + 1e-15


def test_descent_trace_is_monotone():
    rng = np.random.default_rng(12)
    start = ParticleConfiguration(random_configuration(rng, 4))
    history = []
    result = local_minimize(start, OptimizerSettings(seed=1), history=history)
    assert result.value.ratio <= ratio_value(start).ratio
    assert all(b <= a for a, b in zip(history, history[1:]))


def test_local_minimize_rejects_origin_start():
    with pytest.raises(DomainError):
        local_minimize(
            ParticleConfiguration([[0, 0, 0], [1, 0, 0]]), OptimizerSettings()
        )


# ---------------------------------------------------------------------------
# estimate_alpha
# ---------------------------------------------------------------------------

def test_estimate_alpha_n2():
    est = estimate_alpha(2, OptimizerSettings(restarts=8, seed=7))
    assert est.value == pytest.approx(0.5, abs=1e-4)
    assert est.restarts_used == 8


def test_estimate_alpha_n2_cross_seed():
    a = estimate_alpha(2, OptimizerSettings(restarts=8, seed=7))
    b = estimate_alpha(2, OptimizerSettings(restarts=8, seed=987654321))
    assert abs(a.value - b.value) <= 1e-6


def test_estimate_alpha_n3_bracket():
    est = estimate_alpha(3, OptimizerSettings(restarts=32, seed=7))
    assert math.sqrt(5) / 4 <= est.value <= 1 / math.sqrt(3) + 1e-6


def test_estimate_alpha_deterministic():
    settings = OptimizerSettings(restarts=6, seed=42)
    a = estimate_alpha(4, settings)
    b = estimate_alpha(4, settings)
    assert a.value == b.value
    np.testing.assert_array_equal(a.best_config.points, b.best_config.points)


def test_estimate_normalization_and_lower_bound():
    est = estimate_alpha(5, OptimizerSettings(restarts=8, seed=3))
    norms = np.linalg.norm(est.best_config.points, axis=1)
    assert norms.sum() == pytest.approx(5.0, abs=1e-9)
    assert ratio_value(est.best_config).normalizer == pytest.approx(20.0, abs=1e-8)
    assert est.lower_bound <= est.value


def test_estimate_alpha_rejects_n1():
    with pytest.raises(DomainError):
        estimate_alpha(1, OptimizerSettings(restarts=1, seed=0))


# ---------------------------------------------------------------------------
# alpha_sandwich
# ---------------------------------------------------------------------------

def test_sandwich_n2_formula():
    beta = 0.8218
    expected = 2.0 * (beta - 3.0 * (beta / 6.0) ** (1 / 3) * 2 ** (-2 / 3))
    bound = alpha_sandwich(2, beta)
    assert bound.lower == pytest.approx(expected, rel=1e-14)
    assert bound.lower < 0  # vacuous but well-defined at N = 2


def test_sandwich_large_n_limit():
    assert alpha_sandwich(10**6, 0.8218).lower == pytest.approx(0.8218, abs=1e-3)


def test_sandwich_default_r_is_maximal():
    n, beta = 100, 0.8218
    r_star = sandwich_default_r(n, beta)
    assert 0 < r_star <= 1
    best = alpha_sandwich(n, beta, r=r_star).lower_at_r
    for r in np.linspace(0.01, 1.0, 100):
        assert best >= alpha_sandwich(n, beta, r=float(r)).lower_at_r - 1e-12
    # at the maximizing radius the r-family reproduces the closed form
    assert best == pytest.approx(alpha_sandwich(n, beta).lower, rel=1e-12)


def test_sandwich_domain_checks():
    with pytest.raises(DomainError):
        alpha_sandwich(5, 1.5)
    with pytest.raises(DomainError):
        alpha_sandwich(5, 0.8, r=1.5)
    assert alpha_sandwich(5, 0.8).lower_at_r is None


# ---------------------------------------------------------------------------
# cheap slices of the expensive invariants (full versions in acceptance)
# ---------------------------------------------------------------------------

def test_monotone_and_sandwiched_small_n():
    settings = OptimizerSettings(restarts=16, seed=7)
    values = {n: estimate_alpha(n, settings).value for n in range(2, 7)}
    for n in range(3, 7):
        assert values[n] >= values[n - 1] - 2e-3
    for n, v in values.items():
        assert alpha_sandwich(n, 0.8218).lower <= v <= 0.8705 + 1e-6
