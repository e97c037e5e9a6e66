"""Summary statistics for carbon distributions.

One report shape serves every analysis: mean, variance, a percentile table,
and exceedance probabilities against user thresholds.  Grid inputs are
summarized by trapezoid integration and piecewise-linear CDF inversion;
sample inputs by the usual order statistics with linear interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputError, QuantileOutOfRangeError, ValidationError
from .grid import GridDistribution, PointMass
from .sampling import SampleSet

DEFAULT_QUANTILES = (0.5, 0.95)


@dataclass(frozen=True)
class CarbonSummary:
    """Moments, percentiles, and exceedance probabilities of one distribution."""

    mean: float
    variance: float
    std: float
    percentiles: dict[float, float] = field(default_factory=dict)
    prob_exceed: dict[float, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValidationError(f"variance must be >= 0, got {self.variance}")
        qs = sorted(self.percentiles)
        values = [self.percentiles[q] for q in qs]
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValidationError("percentiles must be non-decreasing in q")
        for t, p in self.prob_exceed.items():
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"prob_exceed[{t}] = {p} outside [0, 1]")

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "variance": self.variance,
            "std": self.std,
            "percentiles": {f"{q:g}": v for q, v in sorted(self.percentiles.items())},
            "prob_exceed": {f"{t:g}": p for t, p in sorted(self.prob_exceed.items())},
        }


def _check_quantiles(quantiles) -> list[float]:
    qs = [float(q) for q in quantiles]
    if any(q < 0.0 or q > 1.0 for q in qs):
        raise QuantileOutOfRangeError(f"quantiles must lie in [0, 1], got {quantiles!r}")
    return qs


def summarize(values, quantiles=DEFAULT_QUANTILES, thresholds=()) -> CarbonSummary:
    """Summarize a :class:`SampleSet`, array, grid, or point mass.

    Sample quantiles interpolate linearly between order statistics; sample
    variance is the population variance (ddof=0).
    """
    qs = _check_quantiles(quantiles)
    ts = [float(t) for t in thresholds]

    if isinstance(values, (GridDistribution, PointMass)):
        dist = values
        mean = dist.mean()
        var = dist.variance()
        pct = {q: float(dist.quantile(q)) for q in qs}
        exceed = {t: float(min(max(dist.prob_exceed(t), 0.0), 1.0)) for t in ts}
        return CarbonSummary(mean, var, float(np.sqrt(var)), pct, exceed)

    arr = values.values if isinstance(values, SampleSet) else np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("cannot summarize an empty sample")
    mean = float(arr.mean())
    var = max(float(arr.var()), 0.0)
    pct = {q: float(v) for q, v in zip(qs, np.quantile(arr, qs, method="linear"))} if qs else {}
    exceed = {t: float(np.count_nonzero(arr > t) / arr.size) for t in ts}
    return CarbonSummary(mean, var, float(np.sqrt(var)), pct, exceed)
