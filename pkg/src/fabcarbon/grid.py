"""Discretized probability distributions on uniform grids.

:class:`GridDistribution` is the universal currency of the engine: a
probability density sampled at ``n_points`` evenly spaced abscissae, with the
trapezoidal integral normalized to one.  Quantiles, sampling, and tail
probabilities all treat the node CDF as piecewise linear, which keeps every
downstream consumer consistent with the same discretization.

:class:`PointMass` is the exact degenerate companion used when a builder can
prove the quantity has zero spread (a single defect-density record, gas
uncertainties of zero, ...); keeping the atom exact lets degenerate pipelines
be checked to machine precision instead of to grid resolution.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Union

import numpy as np

from .errors import QuantileOutOfRangeError, ValidationError

DEFAULT_GRID_POINTS = 4096

NORMALIZATION_TOL = 1e-6


class GridSpec(NamedTuple):
    """Bounds and resolution of a uniform evaluation grid."""

    x_min: float
    x_max: float
    n_points: int = DEFAULT_GRID_POINTS


@dataclass(frozen=True, eq=False)
class GridDistribution:
    """Probability density on a uniform grid over ``[x_min, x_max]``.

    The constructor validates (it does not normalize): densities must be
    non-negative and integrate to one within ``1e-6`` by the trapezoid rule.
    Use :meth:`from_unnormalized` when building from raw kernel sums.
    Instances are immutable and safe to share across threads.
    """

    x_min: float
    x_max: float
    density: np.ndarray

    def __post_init__(self):
        density = np.asarray(self.density, dtype=np.float64)
        object.__setattr__(self, "density", density)
        if density.ndim != 1 or density.size < 2:
            raise ValidationError(f"density must be 1-D with >= 2 points, got shape {density.shape}")
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max) and self.x_min < self.x_max):
            raise ValidationError(f"need finite x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if not np.all(np.isfinite(density)):
            raise ValidationError("density contains non-finite values")
        if np.any(density < 0):
            raise ValidationError(f"density has negative values (min {density.min():g})")
        total = np.trapezoid(density, dx=self.dx)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValidationError(f"density integrates to {total!r}, expected 1 +/- {NORMALIZATION_TOL}")
        density.flags.writeable = False

    @classmethod
    def from_unnormalized(cls, x_min: float, x_max: float, density: np.ndarray) -> "GridDistribution":
        """Build from a raw non-negative density, renormalizing its integral to 1.

        Tiny negative values from floating-point cancellation are clipped.
        """
        density = np.asarray(density, dtype=np.float64).copy()
        if density.size < 2:
            raise ValidationError("need at least 2 grid points")
        floor = -1e-12 * max(float(density.max(initial=0.0)), 1.0)
        if density.min(initial=0.0) < floor:
            raise ValidationError(f"density has significantly negative values (min {density.min():g})")
        np.clip(density, 0.0, None, out=density)
        dx = (x_max - x_min) / (density.size - 1)
        total = np.trapezoid(density, dx=dx)
        if not np.isfinite(total) or total <= 0.0:
            raise ValidationError("density has zero total mass; cannot normalize")
        return cls(x_min, x_max, density / total)

    # -- grid geometry ---------------------------------------------------

    @property
    def n_points(self) -> int:
        return self.density.size

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.density.size - 1)

    @cached_property
    def x(self) -> np.ndarray:
        grid = np.linspace(self.x_min, self.x_max, self.n_points)
        grid.flags.writeable = False
        return grid

    @cached_property
    def _node_cdf(self) -> np.ndarray:
        # CDF at the grid nodes by cumulative trapezoid; piecewise linear between nodes.
        cell_mass = 0.5 * (self.density[:-1] + self.density[1:]) * self.dx
        cdf = np.concatenate(([0.0], np.cumsum(cell_mass)))
        cdf.flags.writeable = False
        return cdf

    def support(self) -> tuple[float, float]:
        """Bounds of the region where the density is strictly positive."""
        idx = np.flatnonzero(self.density > 0.0)
        return float(self.x[idx[0]]), float(self.x[idx[-1]])

    # -- moments and probabilities ----------------------------------------

    def mean(self) -> float:
        return float(np.trapezoid(self.x * self.density, dx=self.dx))

    def variance(self) -> float:
        mu = self.mean()
        var = float(np.trapezoid((self.x - mu) ** 2 * self.density, dx=self.dx))
        return max(var, 0.0)

    def std(self) -> float:
        return float(np.sqrt(self.variance()))

    def cdf(self, t) -> np.ndarray | float:
        """CDF evaluated at ``t`` (piecewise linear between grid nodes)."""
        c = np.interp(t, self.x, self._node_cdf / self._node_cdf[-1])
        return float(c) if np.isscalar(t) else c

    def prob_exceed(self, t) -> np.ndarray | float:
        return 1.0 - self.cdf(t)

    def quantile(self, q) -> np.ndarray | float:
        """Inverse of the piecewise-linear node CDF."""
        q_arr = np.atleast_1d(np.asarray(q, dtype=np.float64))
        if np.any(q_arr < 0.0) or np.any(q_arr > 1.0):
            raise QuantileOutOfRangeError(f"quantiles must lie in [0, 1], got {q!r}")
        out = self.ppf(q_arr)
        return float(out[0]) if np.isscalar(q) else out

    def ppf(self, u: np.ndarray) -> np.ndarray:
        """Vectorized inverse CDF for ``u`` in [0, 1); no range check."""
        cdf = self._node_cdf
        target = np.asarray(u, dtype=np.float64) * cdf[-1]
        # First node index with cdf >= target; flat (zero-mass) runs resolve
        # to their left edge, so the interpolation cell always has mass.
        j = np.searchsorted(cdf, target, side="left")
        j = np.clip(j, 1, cdf.size - 1)
        cell = cdf[j] - cdf[j - 1]
        frac = np.where(cell > 0.0, (target - cdf[j - 1]) / np.where(cell > 0.0, cell, 1.0), 0.0)
        return self.x_min + (j - 1 + frac) * self.dx

    # -- reshaping ---------------------------------------------------------

    def truncated(self, lo: float | None = None, hi: float | None = None) -> "GridDistribution":
        """Clip the domain to ``[lo, hi]`` and renormalize.

        Used for physically bounded quantities whose Gaussian kernels leak
        outside the feasible range.  Keeps the point count; the clipped
        density is linearly resampled onto the new uniform grid.
        """
        new_lo = self.x_min if lo is None else max(lo, self.x_min)
        new_hi = self.x_max if hi is None else min(hi, self.x_max)
        if new_lo == self.x_min and new_hi == self.x_max:
            return self
        if not new_lo < new_hi:
            raise ValidationError(f"truncation [{lo}, {hi}] leaves no support in [{self.x_min}, {self.x_max}]")
        new_x = np.linspace(new_lo, new_hi, self.n_points)
        return GridDistribution.from_unnormalized(new_lo, new_hi, np.interp(new_x, self.x, self.density))

    # -- serialization -----------------------------------------------------

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write("x,density\n")
        for xi, di in zip(self.x, self.density):
            buf.write(f"{float(xi)!r},{float(di)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv_text(cls, text: str) -> "GridDistribution":
        lines = [ln for ln in text.strip().splitlines() if ln]
        if not lines or lines[0].strip() != "x,density":
            raise ValidationError("grid CSV must start with header 'x,density'")
        rows = [ln.split(",") for ln in lines[1:]]
        x = np.array([float(r[0]) for r in rows])
        density = np.array([float(r[1]) for r in rows])
        return cls(float(x[0]), float(x[-1]), density)

    def to_json_dict(self) -> dict:
        return {
            "x_min": float(self.x_min),
            "x_max": float(self.x_max),
            "n_points": self.n_points,
            "density": self.density.tolist(),
        }

    @classmethod
    def from_json_dict(cls, record: dict) -> "GridDistribution":
        density = np.asarray(record["density"], dtype=np.float64)
        if len(density) != int(record["n_points"]):
            raise ValidationError("n_points does not match density length")
        return cls(float(record["x_min"]), float(record["x_max"]), density)

    def to_json_text(self) -> str:
        return json.dumps(self.to_json_dict())


@dataclass(frozen=True)
class PointMass:
    """Exact degenerate distribution: all mass at ``value``."""

    value: float

    def mean(self) -> float:
        return self.value

    def variance(self) -> float:
        return 0.0

    def std(self) -> float:
        return 0.0

    def support(self) -> tuple[float, float]:
        return (self.value, self.value)

    def quantile(self, q) -> np.ndarray | float:
        q_arr = np.atleast_1d(np.asarray(q, dtype=np.float64))
        if np.any(q_arr < 0.0) or np.any(q_arr > 1.0):
            raise QuantileOutOfRangeError(f"quantiles must lie in [0, 1], got {q!r}")
        return self.value if np.isscalar(q) else np.full(q_arr.shape, self.value)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return np.full(np.shape(u), self.value)

    def cdf(self, t) -> float:
        return 1.0 if t >= self.value else 0.0

    def prob_exceed(self, t) -> float:
        return 1.0 if t < self.value else 0.0

    def to_grid(self, n_points: int = DEFAULT_GRID_POINTS) -> GridDistribution:
        """Narrow spike rendering, for serialization paths that need a grid."""
        half = 1e-9 * max(abs(self.value), 1.0)
        x = np.linspace(self.value - half, self.value + half, n_points)
        density = np.zeros(n_points)
        density[n_points // 2] = 1.0
        return GridDistribution.from_unnormalized(x[0], x[-1], density)


Distribution = Union[GridDistribution, PointMass]


def grid_from_samples(
    values: np.ndarray,
    n_points: int = DEFAULT_GRID_POINTS,
    bounds: tuple[float, float] | None = None,
) -> GridDistribution:
    """Empirical density of a sample on a uniform grid (linear binning).

    Each sample deposits its mass on the two neighboring grid nodes in
    proportion to proximity, which keeps moments of the gridded density close
    to the sample moments.  Degenerate samples produce a narrow spike.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValidationError("cannot grid an empty sample")
    if bounds is None:
        lo, hi = float(values.min()), float(values.max())
    else:
        lo, hi = bounds
        if np.any(values < lo) or np.any(values > hi):
            raise ValidationError(f"samples fall outside bounds [{lo}, {hi}]")
    if hi <= lo:
        return PointMass(lo).to_grid(n_points)
    dx = (hi - lo) / (n_points - 1)
    pos = (values - lo) / dx
    idx = np.clip(pos.astype(np.int64), 0, n_points - 2)
    frac = pos - idx
    mass = np.bincount(idx, weights=1.0 - frac, minlength=n_points)
    mass += np.bincount(idx + 1, weights=frac, minlength=n_points)
    return GridDistribution.from_unnormalized(lo, hi, mass / (values.size * dx))
