import time

import numpy as np
import pytest

from ionbound.alpha import OptimizerSettings, estimate_alpha
from ionbound.beta import minimize_radial_ratio


@pytest.fixture(scope="session")
def alpha_sweep():
    """Estimates for N = 2..12 at 64 restarts, with per-N and total wall time."""
    settings = OptimizerSettings(restarts=64, seed=7)
    estimates = {}
    per_n = {}
    t_total = time.perf_counter()
    for n in range(2, 13):
        t0 = time.perf_counter()
        estimates[n] = estimate_alpha(n, settings)
        per_n[n] = time.perf_counter() - t0
    return estimates, per_n, time.perf_counter() - t_total


@pytest.fixture(scope="session")
def radial_minimum_default():
    """Radial-measure minimization at the default 200-node grid, with wall time."""
    t0 = time.perf_counter()
    history = []
    measure, value = minimize_radial_ratio(history=history)
    return measure, value, history, time.perf_counter() - t0


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random rotation via QR of a Gaussian matrix, determinant +1."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_configuration(rng: np.random.Generator, n: int) -> np.ndarray:
    """Generic point set with no near-coincidences and no point near the origin."""
    while True:
        pts = rng.standard_normal((n, 3)) * rng.uniform(0.5, 1.5)
        norms = np.linalg.norm(pts, axis=1)
        diffs = pts[:, None, :] - pts[None, :, :]
        d = np.linalg.norm(diffs, axis=2)[np.triu_indices(n, 1)]
        if norms.min() > 0.1 and d.min() > 0.1:
            return pts
