"""Multi-start estimation of the N-point ratio infimum and its two-sided bounds.

The best ratio found over seeded restarts is an upper estimate of the true
infimum; the matching lower bound comes from the statistical-limit constant
through an explicit N-dependent correction.  Results are deterministic given
(N, settings).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import DegenerateNormalizerError, DomainError
from .kernels import (
    COINCIDENCE_RTOL,
    ParticleConfiguration,
    RatioValue,
    _energy_normalizer,
    _norms,
    _ratio_and_gradient,
    _triu,
)

# Default statistical-limit lower bracket used for the Proposition-style bound.
DEFAULT_BETA_LOWER = 0.8218

# Steps moving any point this close to the origin are rejected (the radial
# term is not smooth there); configurations are kept at scale sum|x_i| = N.
ORIGIN_GUARD = 1e-9

_STEP_FLOOR = 1e-15
_VALUE_TIE = 1e-15


@dataclass(frozen=True)
class OptimizerSettings:
    """Knobs for the multi-start descent; defaults converge in seconds for N <= 12."""

    restarts: int = 64
    max_iterations: int = 5000
    ratio_tolerance: float = 1e-10
    step_init: float = 0.1
    step_shrink: float = 0.5
    seed: int = 0
    init_radial_band: tuple[float, float] = (0.2, 1.8)

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if self.ratio_tolerance <= 0:
            raise DomainError("ratio_tolerance must be positive")
        if not 0.0 < self.step_shrink < 1.0:
            raise DomainError("step_shrink must lie in (0, 1)")
        if self.step_init <= 0:
            raise DomainError("step_init must be positive")
        low, high = self.init_radial_band
        if not 0.0 < low < high:
            raise DomainError("init_radial_band needs 0 < low < high")


@dataclass(frozen=True)
class AlphaEstimate:
    """Best ratio found for one N, with the matching closed-form lower bound."""

    n: int
    value: float
    lower_bound: float
    best_config: ParticleConfiguration = field(repr=False)
    restarts_used: int
    converged_restarts: int


class LocalMinimizeResult(NamedTuple):
    config: ParticleConfiguration
    value: RatioValue
    converged: bool
    iterations: int


class SandwichBound(NamedTuple):
    lower: float
    lower_at_r: Optional[float]


def normalize_config(config: ParticleConfiguration) -> ParticleConfiguration:
    """Rescale so that sum|x_i| = N; the ratio is unchanged."""
    pts = _normalized(config.points)
    return ParticleConfiguration(pts)


def _normalized(points: np.ndarray) -> np.ndarray:
    total = float(_norms(points).sum())
    if total == 0.0:
        raise DegenerateNormalizerError("cannot normalize: all points at the origin")
    return points * (points.shape[0] / total)


def _try_ratio(points: np.ndarray) -> float:
    """Ratio of a candidate step, or nan if it violates the guards."""
    norms = _norms(points)
    total = float(norms.sum())
    if total == 0.0:
        return np.nan
    scale = points.shape[0] / total
    if float(norms.min()) * scale < ORIGIN_GUARD:
        return np.nan
    diff = points[:, None, :] - points[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))[_triu(points.shape[0])]
    dmin, dmax = float(d.min()), float(d.max())
    if dmin <= COINCIDENCE_RTOL * dmax:
        return np.nan
    norms2 = norms**2
    energy = float(((norms2[:, None] + norms2[None, :])[_triu(points.shape[0])] / d).sum())
    return energy / ((points.shape[0] - 1) * total)


def _minimize_raw(
    points: np.ndarray, settings: OptimizerSettings, history: Optional[list] = None
) -> tuple[np.ndarray, float, bool, int]:
    """Backtracking gradient descent on the normalized scale manifold.

    Accepts only strictly improving steps, renormalizes after each one, and
    stops when the per-iteration improvement drops below ratio_tolerance, no
    improving step exists above the step floor, or the iteration cap is hit.
    """
    pts = _normalized(np.array(points, dtype=float))
    ratio, _ = _ratio_and_gradient(pts)
    if history is not None:
        history.append(ratio)
    step = settings.step_init
    converged = False
    iterations = 0
    for iterations in range(1, settings.max_iterations + 1):
        _, grad = _ratio_and_gradient(pts)
        accepted = False
        while step > _STEP_FLOOR:
            cand = pts - step * grad
            new_ratio = _try_ratio(cand)
            if np.isfinite(new_ratio) and new_ratio < ratio:
                accepted = True
                break
            step *= settings.step_shrink
        if not accepted:
            converged = True
            break
        improvement = ratio - new_ratio
        pts = _normalized(cand)
        ratio = new_ratio
        if history is not None:
            history.append(ratio)
        step = min(step * 2.0, 1.0)
        if improvement < settings.ratio_tolerance:
            converged = True
            break
    return pts, ratio, converged, iterations


def local_minimize(
    start: ParticleConfiguration,
    settings: OptimizerSettings,
    history: Optional[list] = None,
) -> LocalMinimizeResult:
    """Descend from ``start``; the returned ratio never exceeds the start ratio.

    Non-convergence within the iteration cap is flagged, not raised.  The
    optional ``history`` list collects the (non-increasing) ratio trace.
    """
    if np.any(_norms(start.points) == 0.0):
        raise DomainError("local_minimize needs every start point off the origin")
    pts, ratio, converged, iterations = _minimize_raw(start.points, settings, history)
    config = ParticleConfiguration(pts)
    energy, normalizer = _energy_normalizer(pts)
    return LocalMinimizeResult(
        config=config,
        value=RatioValue(energy=energy, normalizer=normalizer, ratio=energy / normalizer),
        converged=converged,
        iterations=iterations,
    )


def _initial_points(n: int, settings: OptimizerSettings, restart: int) -> np.ndarray:
    """Seeded start: i.i.d. uniform directions, radii uniform in the init band."""
    seq = np.random.SeedSequence(entropy=settings.seed, spawn_key=(n, restart))
    rng = np.random.default_rng(seq)
    low, high = settings.init_radial_band
    while True:
        dirs = rng.standard_normal((n, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pts = dirs * rng.uniform(low, high, size=n)[:, None]
        if np.isfinite(_try_ratio(pts)):
            return _normalized(pts)


def estimate_alpha(
    n: int,
    settings: OptimizerSettings | None = None,
    beta_lower: float = DEFAULT_BETA_LOWER,
) -> AlphaEstimate:
    """Upper estimate of the N-point ratio infimum by multi-start descent.

    Deterministic given (n, settings): restart k is seeded from
    (settings.seed, n, k) and the reduction keeps the lowest restart index
    among values within 1e-15 of the minimum, so it is order-independent.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    if settings is None:
        settings = OptimizerSettings()
    values = np.empty(settings.restarts)
    configs: list[np.ndarray] = []
    converged_count = 0
    for k in range(settings.restarts):
        pts, ratio, converged, _ = _minimize_raw(_initial_points(n, settings, k), settings)
        values[k] = ratio
        configs.append(pts)
        converged_count += int(converged)
    best = int(np.nonzero(values <= values.min() + _VALUE_TIE)[0][0])
    return AlphaEstimate(
        n=n,
        value=float(values[best]),
        lower_bound=alpha_sandwich(n, beta_lower).lower,
        best_config=ParticleConfiguration(configs[best]),
        restarts_used=settings.restarts,
        converged_restarts=converged_count,
    )


def alpha_sandwich(
    n: int, beta_lower: float, r: Optional[float] = None
) -> SandwichBound:
    """Closed-form lower bounds for the N-point ratio from a statistical-limit bracket.

    ``lower`` uses the shell radius r* = (4 beta N / 3)^(-1/3) that maximizes
    the r-parametrized family; ``lower_at_r`` evaluates that family at a
    caller-chosen r in (0, 1].
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    if not 0.0 < beta_lower < 1.0:
        raise DomainError("beta_lower must lie in (0, 1)")
    scale = n / (n - 1)
    lower = scale * (beta_lower - 3.0 * (beta_lower / 6.0) ** (1.0 / 3.0) * n ** (-2.0 / 3.0))
    lower_at_r = None
    if r is not None:
        if not 0.0 < r <= 1.0:
            raise DomainError("r must lie in (0, 1]")
        lower_at_r = scale * (
            beta_lower - (2.0 * r * r / 3.0) * beta_lower - 1.0 / (r * n)
        )
    return SandwichBound(lower=lower, lower_at_r=lower_at_r)


def sandwich_default_r(n: int, beta_lower: float) -> float:
    """The maximizing shell radius (4 beta N / 3)^(-1/3) of the r-family."""
    return (4.0 * beta_lower * n / 3.0) ** (-1.0 / 3.0)
