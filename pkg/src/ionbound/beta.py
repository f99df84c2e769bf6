"""Two-sided bracketing of the statistical-limit ratio constant.

The lower side comes from maximizing the scalar reduction g(lambda) of the
blended-kernel maximin problem on [0.8, 1]; the upper side from a closed-form
trial measure and from fractional quadratic programming over discretized
radial measures (Dinkelbach iteration with projected descent on the weight
simplex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    DegenerateGridError,
    DomainError,
    InconsistentBracketError,
    IterationLimitError,
    NegativeRadicandError,
)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

LAMBDA_DOMAIN = (0.8, 1.0)

# Analytic value of the radial trial measure (3/4) r^(-3/2) on [1, 9].
TRIAL_MEASURE_ANALYTIC = 115.0 / 81.0 - math.log(3.0) / 2.0

DEFAULT_NODE_COUNT = 200
DEFAULT_NODE_RANGE = (0.05, 20.0)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialMeasure:
    """Discrete probability measure on (0, inf): increasing nodes, weights summing to 1."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise DomainError("nodes and weights must be matching non-empty 1-d arrays")
        if nodes[0] <= 0 or np.any(np.diff(nodes) <= 0):
            raise DomainError("nodes must be strictly increasing and positive")
        if np.any(weights < 0):
            raise DomainError("weights must be non-negative")
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            raise DomainError("weights must sum to 1 within 1e-12")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def dilated(self, t: float) -> "RadialMeasure":
        if t <= 0:
            raise DomainError("dilation factor must be positive")
        return RadialMeasure(self.nodes * t, self.weights)


@dataclass(frozen=True)
class LambdaPoint:
    """One evaluation of the scalar reduction: lambda, its companion lambda', and g."""

    lam: float
    lambda_prime: float
    g: float

    def __post_init__(self):
        if self.lambda_prime > self.lam + 1e-12:
            raise DomainError("lambda_prime must not exceed lambda")
        if abs(self.residual()) >= 1e-10:
            raise DomainError("lambda_prime does not satisfy its defining equation")

    def residual(self) -> float:
        """Defining-equation residual (lam - lam') - 2 sqrt((2/3) lam' (1-lam)) - 2 sqrt(lam (1-lam))."""
        one_minus = 1.0 - self.lam
        return (
            (self.lam - self.lambda_prime)
            - 2.0 * math.sqrt((2.0 / 3.0) * self.lambda_prime * one_minus)
            - 2.0 * math.sqrt(self.lam * one_minus)
        )


@dataclass(frozen=True)
class BetaBracket:
    """Computed lower/upper estimates for the limit constant, with provenance."""

    lower: float
    lower_source: str
    upper: float
    upper_source: str
    certificate_measure: Optional[RadialMeasure] = field(default=None, repr=False)

    def __post_init__(self):
        if self.lower > self.upper:
            raise InconsistentBracketError(
                f"lower {self.lower:.7f} exceeds upper {self.upper:.7f}"
            )


@dataclass(frozen=True)
class BetaSettings:
    """Grid sizes and tolerances for the bracket computation."""

    g_tolerance: float = 1e-10
    lambda_grid: int = 101
    b_grid: int = 201
    c_grid: int = 201
    node_count: int = DEFAULT_NODE_COUNT
    node_range: tuple[float, float] = DEFAULT_NODE_RANGE
    dinkelbach_tolerance: float = 1e-10
    inner_iterations: int = 4000
    outer_iterations: int = 500


class WMaximinResult(NamedTuple):
    value: float
    grid_error: float
    lambda_at_max: float


# ---------------------------------------------------------------------------
# scalar reduction g(lambda) and its maximization
# ---------------------------------------------------------------------------

def g_of_lambda(lam: float) -> LambdaPoint:
    """Evaluate the closed-form companion lambda' and g = lambda - lambda'.

    Only defined on [0.8, 1], where the defining equation has the closed-form
    solution used here.
    """
    if not LAMBDA_DOMAIN[0] <= lam <= LAMBDA_DOMAIN[1]:
        raise DomainError("lambda must lie in [0.8, 1]")
    radicand = (lam + 2.0) / 3.0 - 2.0 * math.sqrt(lam * (1.0 - lam))
    if radicand < 0:
        raise NegativeRadicandError(f"radicand {radicand:g} negative at lambda={lam:g}")
    lambda_prime = (math.sqrt(radicand) - math.sqrt((2.0 / 3.0) * (1.0 - lam))) ** 2
    return LambdaPoint(lam=lam, lambda_prime=lambda_prime, g=lam - lambda_prime)


def maximize_g(tolerance: float) -> tuple[float, float]:
    """Golden-section maximization of g over [0.8, 1] to the given bracket width."""
    if tolerance <= 0:
        raise DomainError("tolerance must be positive")
    lo, hi = LAMBDA_DOMAIN
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    gc = g_of_lambda(c).g
    gd = g_of_lambda(d).g
    while hi - lo > tolerance:
        if gc > gd:
            hi, d, gd = d, c, gc
            c = hi - _INV_PHI * (hi - lo)
            gc = g_of_lambda(c).g
        else:
            lo, c, gc = c, d, gd
            d = lo + _INV_PHI * (hi - lo)
            gd = g_of_lambda(d).g
    lam0 = 0.5 * (lo + hi)
    return lam0, g_of_lambda(lam0).g


# ---------------------------------------------------------------------------
# blended-kernel maximin on the reduced (a=1, b, c) domain
# ---------------------------------------------------------------------------

def _inner_min_over_bc(lams: np.ndarray, b_grid: int, c_grid: int) -> np.ndarray:
    """min over b in [0,1], c in [max(1-b, 1e-9), 1+b] of W_lambda(1,b,c)/(1+b), per lambda."""
    mins = np.full(lams.shape, np.inf)
    for b in np.linspace(0.0, 1.0, b_grid):
        c = np.linspace(max(1.0 - b, 1e-9), 1.0 + b, c_grid)
        k1 = 1.0 + b * b / c
        k2 = c + (2.0 / 3.0) * b * b
        w = np.outer(lams, k1) + np.outer(1.0 - lams, k2)
        np.minimum(mins, w.min(axis=1) / (1.0 + b), out=mins)
    return mins


def w_maximin(lambda_grid: int, b_grid: int, c_grid: int) -> WMaximinResult:
    """Grid maximin of the normalized blended kernel on the reduced domain.

    Scaling to a = 1 is exact (the normalized kernel is homogeneous of degree
    zero).  The inner min over a finite grid upper-bounds the true infimum,
    so ``value`` is at least g_max minus ``grid_error``, which combines the
    observed drop under nested (b, c) refinement with the resolution of the
    lambda grid against the golden-section maximum of g.
    """
    if lambda_grid < 2 or b_grid < 2 or c_grid < 2:
        raise DegenerateGridError("all grid counts must be >= 2")
    lams = np.linspace(*LAMBDA_DOMAIN, lambda_grid)
    coarse = _inner_min_over_bc(lams, b_grid, c_grid)
    fine = _inner_min_over_bc(lams, 2 * b_grid - 1, 2 * c_grid - 1)
    i = int(np.argmax(coarse))
    value = float(coarse[i])
    bc_drop = value - float(fine.max())
    _, g_max = maximize_g(1e-12)
    lambda_resolution = max(0.0, g_max - max(g_of_lambda(l).g for l in lams))
    return WMaximinResult(
        value=value,
        grid_error=bc_drop + lambda_resolution,
        lambda_at_max=float(lams[i]),
    )


# ---------------------------------------------------------------------------
# radial upper bound
# ---------------------------------------------------------------------------

def radial_ratio(measure: RadialMeasure) -> float:
    """Symmetrized quadratic form over the linear normalizer, dilation invariant."""
    r = measure.nodes
    w = measure.weights
    q = 0.5 * (r[:, None] ** 2 + r[None, :] ** 2) / np.maximum.outer(r, r)
    return float(w @ q @ w) / float(w @ r)


def _composite_gauss(points: int, order: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, 1] with about ``points`` nodes."""
    panels = max(1, points // order)
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    widths = np.diff(edges)
    nodes = (edges[:-1][:, None] + widths[:, None] * (x[None, :] + 1.0) / 2.0).ravel()
    weights = (widths[:, None] * w[None, :] / 2.0).ravel()
    return nodes, weights


class TrialMeasureValue(NamedTuple):
    analytic: float
    quadrature: float
    normalization: float


def trial_measure_value(quadrature_points: int) -> TrialMeasureValue:
    """Closed-form and quadrature values of the radial trial density (3/4) r^(-3/2) on [1, 9].

    The quadrature integrates the ordered double integral (inner radius below
    the outer one) with composite Gauss-Legendre rules of about
    ``quadrature_points`` nodes per dimension, and also reports the density
    normalization integral, which must be 1.
    """
    if quadrature_points < 16:
        raise DomainError("quadrature_points must be >= 16")
    t, wt = _composite_gauss(quadrature_points)
    s = 1.0 + 8.0 * t
    ws = 8.0 * wt
    density_s = 0.75 * s ** (-1.5)
    normalization = float(ws @ density_s)
    denominator = float(ws @ (s * density_s))
    # inner integral over r in [1, s]: (r^2 + s^2)/s against the density;
    # chunked over the outer nodes to keep the (s, r) matrices small
    inner = np.empty_like(s)
    for lo in range(0, s.size, 512):
        sb = s[lo : lo + 512]
        r = 1.0 + np.outer(sb - 1.0, t)
        vals = 0.75 * r ** (-1.5) * (r**2 + (sb**2)[:, None])
        inner[lo : lo + 512] = (sb - 1.0) * (vals @ wt)
    numerator = float(ws @ (density_s * inner / s))
    return TrialMeasureValue(
        analytic=TRIAL_MEASURE_ANALYTIC,
        quadrature=numerator / denominator,
        normalization=normalization,
    )


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (exact, sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, v.size + 1)
    rho = int(np.nonzero(u + (1.0 - css) / j > 0)[0][-1])
    tau = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + tau, 0.0)


def default_nodes(
    count: int = DEFAULT_NODE_COUNT, node_range: tuple[float, float] = DEFAULT_NODE_RANGE
) -> np.ndarray:
    """Log-spaced node grid; only its dynamic range matters by dilation invariance."""
    lo, hi = node_range
    if count < 1 or lo <= 0 or hi <= lo:
        raise DomainError("need count >= 1 and 0 < lo < hi")
    if count == 1:
        return np.array([math.sqrt(lo * hi)])
    return np.geomspace(lo, hi, count)


def trial_weights_on_nodes(nodes: np.ndarray) -> np.ndarray:
    """Discretization of the trial density onto a node grid (uniform fallback)."""
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size == 1:
        return np.ones(1)
    cell = np.gradient(nodes)
    w = np.where((nodes >= 1.0) & (nodes <= 9.0), 0.75 * nodes ** (-1.5) * cell, 0.0)
    total = w.sum()
    if total <= 0:
        w = np.ones_like(nodes)
        total = w.sum()
    return w / total


def minimize_radial_ratio(
    nodes: Optional[np.ndarray] = None,
    settings: Optional[BetaSettings] = None,
    history: Optional[list] = None,
) -> tuple[RadialMeasure, float]:
    """Minimize the radial ratio over the weight simplex at fixed nodes.

    Dinkelbach iteration: with theta the current ratio, the parametric
    subproblem min_w [Q(w) - theta L(w)] is solved by projected gradient
    descent on the simplex, warm-started from the previous weights, which
    keeps the theta sequence non-increasing.  Stops when theta changes by
    less than the Dinkelbach tolerance.
    """
    if settings is None:
        settings = BetaSettings()
    if nodes is None:
        nodes = default_nodes(settings.node_count, settings.node_range)
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size == 1:
        measure = RadialMeasure(nodes, np.ones(1))
        value = radial_ratio(measure)
        if history is not None:
            history.append(value)
        return measure, value
    q = 0.5 * (nodes[:, None] ** 2 + nodes[None, :] ** 2) / np.maximum.outer(nodes, nodes)
    lip = 2.0 * float(np.abs(np.linalg.eigvalsh(q)).max())
    w = trial_weights_on_nodes(nodes)
    theta = float(w @ q @ w) / float(w @ nodes)
    if history is not None:
        history.append(theta)
    for _ in range(settings.outer_iterations):
        for _ in range(settings.inner_iterations):
            step = w - (2.0 * (q @ w) - theta * nodes) / lip
            w_new = project_to_simplex(step)
            shift = float(np.abs(w_new - w).max())
            w = w_new
            if shift < 1e-14:
                break
        theta_new = float(w @ q @ w) / float(w @ nodes)
        if history is not None:
            history.append(theta_new)
        done = theta - theta_new < settings.dinkelbach_tolerance
        theta = theta_new
        if done:
            return RadialMeasure(nodes, w / w.sum()), theta
    raise IterationLimitError(
        "Dinkelbach iteration cap reached",
        best=(RadialMeasure(nodes, w / w.sum()), theta),
    )


# ---------------------------------------------------------------------------
# the bracket
# ---------------------------------------------------------------------------

class BracketDetail(NamedTuple):
    bracket: BetaBracket
    lambda_0: float
    g_max: float
    maximin: WMaximinResult
    radial_minimum: float


def bracket_detail(settings: Optional[BetaSettings] = None) -> BracketDetail:
    """Bracket plus the individual estimates it was assembled from."""
    if settings is None:
        settings = BetaSettings()
    lambda_0, g_max = maximize_g(settings.g_tolerance)
    maximin = w_maximin(settings.lambda_grid, settings.b_grid, settings.c_grid)
    maximin_discounted = maximin.value - maximin.grid_error
    if g_max >= maximin_discounted:
        lower, lower_source = g_max, "g_max"
    else:
        lower, lower_source = maximin_discounted, "maximin-grid"
    measure, optimized = minimize_radial_ratio(settings=settings)
    if TRIAL_MEASURE_ANALYTIC <= optimized:
        upper, upper_source, certificate = TRIAL_MEASURE_ANALYTIC, "trial-measure", None
    else:
        upper, upper_source, certificate = optimized, "optimized-measure", measure
    bracket = BetaBracket(
        lower=lower,
        lower_source=lower_source,
        upper=upper,
        upper_source=upper_source,
        certificate_measure=certificate,
    )
    return BracketDetail(
        bracket=bracket,
        lambda_0=lambda_0,
        g_max=g_max,
        maximin=maximin,
        radial_minimum=optimized,
    )


def beta_bracket(settings: Optional[BetaSettings] = None) -> BetaBracket:
    """Best available lower and upper estimates with provenance of each side.

    Lower: the larger of the g maximum and the grid maximin discounted by its
    reported grid error.  Upper: the smaller of the trial-measure closed form
    and the optimized radial measure, which then becomes the certificate.
    """
    return bracket_detail(settings).bracket
