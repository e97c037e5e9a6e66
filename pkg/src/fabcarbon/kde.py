"""Weighted Gaussian kernel density estimation.

Sparse fab observations (yearly energy intensities, defect-density records,
grid-intensity histories) become continuous densities by summing one Gaussian
kernel per observation.  Weights let a record's influence reflect something
other than its count — most importantly regional production-capacity shares.

Rule-of-thumb bandwidths use the weighted standard deviation and the effective
sample size ``m = (sum w)^2 / sum w^2``, so duplicating every record (or
rescaling all weights) leaves the bandwidth unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyInputError,
    GridTooNarrowError,
    NonPositiveBandwidthError,
    ValidationError,
    ZeroWeightSumError,
)
from .grid import DEFAULT_GRID_POINTS, GridDistribution, GridSpec

#: Kernels are considered fully covered by a grid spanning the data +- this many
#: bandwidths; the Gaussian mass beyond 4 sigma is ~6e-5 and is renormalized away.
KERNEL_SPAN_SIGMAS = 4.0

#: Relative bandwidth used when a rule is requested but the data has zero
#: spread (a single observation, or identical repeats): the kernel width
#: becomes 5% of the observation magnitude.
DEGENERATE_BANDWIDTH_FRACTION = 0.05

_EVAL_CHUNK = 512  # kernel rows evaluated per block, bounds peak memory

BANDWIDTH_RULES = ("scott", "silverman")


def effective_sample_size(weights: np.ndarray) -> float:
    """Kish effective sample size ``(sum w)^2 / sum w^2``."""
    w = np.asarray(weights, dtype=np.float64)
    return float(w.sum() ** 2 / np.sum(w**2))


def weighted_mean_std(points: np.ndarray, weights: np.ndarray) -> tuple[float, float]:
    w = weights / weights.sum()
    mu = float(np.dot(w, points))
    var = float(np.dot(w, (points - mu) ** 2))
    return mu, float(np.sqrt(max(var, 0.0)))


def weighted_quantile(points: np.ndarray, weights: np.ndarray, q: float) -> float:
    """Quantile of a weighted empirical distribution (step CDF, left-continuous inverse)."""
    order = np.argsort(points, kind="stable")
    cum = np.cumsum(weights[order])
    return float(points[order][np.searchsorted(cum, q * cum[-1], side="left").clip(0, points.size - 1)])


def _fallback_bandwidth(mu: float) -> float:
    return DEGENERATE_BANDWIDTH_FRACTION * (abs(mu) if mu != 0.0 else 1.0)


def scott_bandwidth(points: np.ndarray, weights: np.ndarray) -> float:
    """``sigma_w * m^(-1/5)`` with the weighted sigma and effective sample size."""
    mu, sigma = weighted_mean_std(points, weights)
    if sigma == 0.0:
        return _fallback_bandwidth(mu)
    return sigma * effective_sample_size(weights) ** (-0.2)


def silverman_bandwidth(points: np.ndarray, weights: np.ndarray) -> float:
    """``0.9 * min(sigma_w, IQR_w / 1.34) * m^(-1/5)``."""
    mu, sigma = weighted_mean_std(points, weights)
    iqr = weighted_quantile(points, weights, 0.75) - weighted_quantile(points, weights, 0.25)
    spread = min(sigma, iqr / 1.34) if iqr > 0.0 else sigma
    if spread == 0.0:
        return _fallback_bandwidth(mu)
    return 0.9 * spread * effective_sample_size(weights) ** (-0.2)


@dataclass(frozen=True, eq=False)
class KdeInput:
    """Kernel centers, optional non-negative weights, and a bandwidth.

    ``bandwidth`` is either an explicit positive width or one of the rule tags
    ``"scott"`` / ``"silverman"``.  Omitted weights mean equal weights.
    """

    points: np.ndarray
    weights: np.ndarray | None = None
    bandwidth: float | str = "scott"
    _resolved_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 1 or points.size == 0:
            raise EmptyInputError("KDE needs a non-empty 1-D array of points")
        if not np.all(np.isfinite(points)):
            raise ValidationError("KDE points contain non-finite values")
        if self.weights is None:
            weights = np.ones_like(points)
        else:
            weights = np.asarray(self.weights, dtype=np.float64)
            if weights.shape != points.shape:
                raise ValidationError(f"weights shape {weights.shape} != points shape {points.shape}")
            if np.any(weights < 0) or not np.all(np.isfinite(weights)):
                raise ValidationError("weights must be finite and non-negative")
            if weights.sum() <= 0.0:
                raise ZeroWeightSumError("KDE weights sum to zero")
        if isinstance(self.bandwidth, str):
            if self.bandwidth not in BANDWIDTH_RULES:
                raise ValidationError(f"unknown bandwidth rule {self.bandwidth!r}; expected one of {BANDWIDTH_RULES}")
        elif not (np.isfinite(self.bandwidth) and self.bandwidth > 0.0):
            raise NonPositiveBandwidthError(f"explicit bandwidth must be > 0, got {self.bandwidth!r}")
        points.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "_resolved_weights", weights)

    def bandwidth_value(self) -> float:
        if self.bandwidth == "scott":
            return scott_bandwidth(self.points, self._resolved_weights)
        if self.bandwidth == "silverman":
            return silverman_bandwidth(self.points, self._resolved_weights)
        return float(self.bandwidth)

    def normalized_weights(self) -> np.ndarray:
        return self._resolved_weights / self._resolved_weights.sum()


def kde_density(points: np.ndarray, weights: np.ndarray, h: float, x: np.ndarray) -> np.ndarray:
    """Raw weighted kernel sum ``sum_i w_i * N(x; x_i, h^2)`` (not renormalized).

    ``weights`` should already sum to the total mass wanted on the real line;
    the grid captures all of it only up to kernel truncation at the edges.
    """
    if h <= 0.0:
        raise NonPositiveBandwidthError(f"bandwidth must be > 0, got {h}")
    out = np.zeros_like(x, dtype=np.float64)
    norm = 1.0 / (h * np.sqrt(2.0 * np.pi))
    for start in range(0, points.size, _EVAL_CHUNK):
        pts = points[start : start + _EVAL_CHUNK, None]
        wts = weights[start : start + _EVAL_CHUNK, None]
        z = (x[None, :] - pts) / h
        out += norm * np.sum(wts * np.exp(-0.5 * z * z), axis=0)
    return out


def default_grid(kde_input: KdeInput, n_points: int = DEFAULT_GRID_POINTS) -> GridSpec:
    """Grid spanning the kernel centers +- ``KERNEL_SPAN_SIGMAS`` bandwidths."""
    h = kde_input.bandwidth_value()
    pad = KERNEL_SPAN_SIGMAS * h
    return GridSpec(float(kde_input.points.min()) - pad, float(kde_input.points.max()) + pad, n_points)


def kde_fit(kde_input: KdeInput, grid: GridSpec | tuple[float, float, int]) -> GridDistribution:
    """Weighted Gaussian KDE evaluated on ``grid`` and renormalized.

    The grid must cover every kernel center +- ``KERNEL_SPAN_SIGMAS``
    bandwidths; a narrower grid raises :class:`GridTooNarrowError` reporting
    the span required.
    """
    grid = GridSpec(*grid)
    h = kde_input.bandwidth_value()
    pad = KERNEL_SPAN_SIGMAS * h
    need_lo = float(kde_input.points.min()) - pad
    need_hi = float(kde_input.points.max()) + pad
    if grid.x_min > need_lo or grid.x_max < need_hi:
        raise GridTooNarrowError(
            f"grid [{grid.x_min}, {grid.x_max}] must cover [{need_lo}, {need_hi}] "
            f"(kernel centers +- {KERNEL_SPAN_SIGMAS} * h with h = {h:g})"
        )
    x = np.linspace(grid.x_min, grid.x_max, grid.n_points)
    density = kde_density(kde_input.points, kde_input.normalized_weights(), h, x)
    return GridDistribution.from_unnormalized(grid.x_min, grid.x_max, density)
