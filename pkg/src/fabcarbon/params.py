"""Per-node parameter distributions from raw fab records.

Four stochastic quantities drive embodied carbon: fab energy per die area
(EPA, kWh/cm2), CO2-equivalent process-gas emissions per area (GPA,
kg CO2e/cm2), manufacturing yield through the defect density D0, and the
carbon intensity of the electricity powering the fab (CI, g CO2e/kWh).
Each builder turns a node's sparse public records into a distribution:

* EPA — one kernel per year since mass production, obtained by unwinding the
  node's cumulative process-efficiency improvements from the anchor-year
  characterization value.
* GPA — a sum of independent per-gas normals whose sigmas come from the
  95% relative uncertainties of emission-factor accounting, truncated at 0.
* Yield — a KDE over defect densities in a date window, pushed through the
  Poisson kernel ``Y = exp(-D0 * A)`` by exact change of variables.
* CI — a capacity-share-weighted KDE over regional grid-intensity histories,
  each region's records sharing its production share evenly.

Degenerate data (a single defect record, zero gas uncertainty, identical
utilization samples) produces an exact :class:`PointMass` rather than an
artificially widened kernel.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptyDefectWindowError,
    EmptyEfficiencySeriesError,
    EmptyGasInventoryError,
    MismatchedLengthsError,
    NonPositiveAreaError,
    SampleOutOfUnitIntervalError,
    SharesDontSumToOneError,
    ValidationError,
    YearBeforeMassProductionError,
)
from .grid import DEFAULT_GRID_POINTS, Distribution, GridDistribution, PointMass
from .kde import KERNEL_SPAN_SIGMAS, KdeInput, default_grid, kde_density, kde_fit

#: z-score of the symmetric 95% interval of a normal distribution; converts
#: "95% relative error" half-widths into standard deviations.
Z_95 = 1.959963984540054

SHARE_TOL = 1e-9


@dataclass(frozen=True)
class GasEmission:
    """One process gas: warming potential, post-abatement emission rate, and
    the half-width of its 95% uncertainty interval as a fraction of the mean."""

    gas: str
    gwp: float
    emission_per_area: float  # kg gas per cm2, post-abatement
    rel_error_95: float  # e.g. 3.0 for a 300% relative error
    abatement: float = 0.0

    def __post_init__(self):
        if self.gwp <= 0.0:
            raise ValidationError(f"{self.gas}: gwp must be > 0, got {self.gwp}")
        if self.emission_per_area < 0.0:
            raise ValidationError(f"{self.gas}: emission_per_area must be >= 0")
        if self.rel_error_95 < 0.0:
            raise ValidationError(f"{self.gas}: rel_error_95 must be >= 0")
        if not 0.0 <= self.abatement <= 1.0:
            raise ValidationError(f"{self.gas}: abatement must be in [0, 1]")

    @property
    def mean_co2e(self) -> float:
        """kg CO2e per cm2."""
        return self.emission_per_area * self.gwp

    @property
    def sigma_co2e(self) -> float:
        return self.mean_co2e * self.rel_error_95 / Z_95


@dataclass(frozen=True)
class RegionCIHistory:
    """Historical grid carbon intensity (g CO2e/kWh) for one region."""

    region: str
    records: tuple[tuple[_dt.datetime, float], ...]

    def __post_init__(self):
        if not self.records:
            raise ValidationError(f"{self.region}: CI history is empty")
        stamps = [t for t, _ in self.records]
        if any(b <= a for a, b in zip(stamps, stamps[1:])):
            raise ValidationError(f"{self.region}: timestamps must be strictly increasing")
        if any(v < 0.0 for _, v in self.records):
            raise ValidationError(f"{self.region}: carbon intensity must be >= 0")
        object.__setattr__(self, "records", tuple((t, float(v)) for t, v in self.records))

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.records])


@dataclass(frozen=True)
class TechNode:
    """Everything the model knows about one technology node."""

    name: str
    epa_base: float  # kWh per cm2 at the anchor year
    epa_anchor_year: int
    mass_production_year: int
    mpa: float  # kg CO2e per cm2, deterministic materials term
    efficiency_series: tuple[tuple[int, float], ...] = ()
    defect_series: tuple[tuple[_dt.date, float], ...] = ()
    gas_inventory: tuple[GasEmission, ...] = ()
    capacity_shares: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.epa_base <= 0.0:
            raise ValidationError(f"{self.name}: epa_base must be > 0")
        if self.mpa < 0.0:
            raise ValidationError(f"{self.name}: mpa must be >= 0")
        years = [y for y, _ in self.efficiency_series]
        mults = [m for _, m in self.efficiency_series]
        if years != sorted(years):
            raise ValidationError(f"{self.name}: efficiency series must be sorted by year")
        if any(m < 1.0 for m in mults):
            raise ValidationError(f"{self.name}: efficiency multipliers must be >= 1")
        if any(b < a for a, b in zip(mults, mults[1:])):
            raise ValidationError(f"{self.name}: efficiency multipliers must be non-decreasing")
        if any(d0 <= 0.0 for _, d0 in self.defect_series):
            raise ValidationError(f"{self.name}: defect densities must be > 0")
        dates = [d for d, _ in self.defect_series]
        if dates != sorted(dates):
            raise ValidationError(f"{self.name}: defect series must be sorted by date")
        if self.capacity_shares:
            total = sum(s for _, s in self.capacity_shares)
            if abs(total - 1.0) > SHARE_TOL:
                raise SharesDontSumToOneError(f"{self.name}: capacity shares sum to {total!r}")
            if any(not 0.0 <= s <= 1.0 for _, s in self.capacity_shares):
                raise ValidationError(f"{self.name}: shares must lie in [0, 1]")

    def efficiency_at(self, year: int) -> float:
        """Cumulative efficiency multiplier in force at ``year``.

        Gaps carry the last known multiplier forward; years before the first
        record see no improvement (multiplier 1), never an extrapolated one.
        """
        if not self.efficiency_series:
            raise EmptyEfficiencySeriesError(f"{self.name}: no efficiency records")
        current = 1.0
        for y, mult in self.efficiency_series:
            if y > year:
                break
            current = mult
        return current


# --- EPA ----------------------------------------------------------------------


def epa_yearly_values(node: TechNode, as_of_year: int) -> np.ndarray:
    """EPA (kWh/cm2) for each year from mass production through ``as_of_year``."""
    if as_of_year < node.mass_production_year:
        raise YearBeforeMassProductionError(
            f"{node.name}: as_of_year {as_of_year} predates mass production "
            f"({node.mass_production_year})"
        )
    anchor = node.efficiency_at(node.epa_anchor_year)
    years = np.arange(node.mass_production_year, as_of_year + 1)
    return np.array([node.epa_base * anchor / node.efficiency_at(int(y)) for y in years])


def build_epa_distribution(
    node: TechNode,
    as_of_year: int,
    n_points: int = DEFAULT_GRID_POINTS,
    bandwidth: float | str = "scott",
) -> GridDistribution:
    """Equal-weight KDE over the node's yearly EPA values, truncated at 0."""
    values = epa_yearly_values(node, as_of_year)
    kin = KdeInput(points=values, bandwidth=bandwidth)
    dist = kde_fit(kin, default_grid(kin, n_points))
    return dist.truncated(lo=0.0)


# --- GPA ----------------------------------------------------------------------


def _normal_grid(mu: float, sigma: float, n_points: int) -> GridDistribution:
    """Analytic normal rendered on a grid and truncated to non-negative values."""
    if sigma == 0.0:
        raise ValidationError("sigma must be > 0 for a grid rendering")
    lo = max(0.0, mu - 8.0 * sigma)
    hi = mu + 8.0 * sigma
    x = np.linspace(lo, hi, n_points)
    density = np.exp(-0.5 * ((x - mu) / sigma) ** 2) / (sigma * np.sqrt(2.0 * np.pi))
    return GridDistribution.from_unnormalized(lo, hi, density)


def build_gpa_distribution(node: TechNode, n_points: int = DEFAULT_GRID_POINTS) -> Distribution:
    """Total gas emissions per area: Normal(sum mu_g, sum sigma_g^2), truncated at 0.

    Gases are treated as mutually independent, so means and variances add.
    Zero total spread yields an exact point mass.
    """
    if not node.gas_inventory:
        raise EmptyGasInventoryError(f"{node.name}: gas inventory is empty")
    mu = sum(g.mean_co2e for g in node.gas_inventory)
    var = sum(g.sigma_co2e**2 for g in node.gas_inventory)
    if var == 0.0:
        return PointMass(mu)
    return _normal_grid(mu, float(np.sqrt(var)), n_points)


def build_gpa_components(node: TechNode, n_points: int = DEFAULT_GRID_POINTS) -> dict[str, Distribution]:
    """Per-gas CO2e distributions (same truncation rules as the total)."""
    if not node.gas_inventory:
        raise EmptyGasInventoryError(f"{node.name}: gas inventory is empty")
    out: dict[str, Distribution] = {}
    for g in node.gas_inventory:
        out[g.gas] = PointMass(g.mean_co2e) if g.sigma_co2e == 0.0 else _normal_grid(g.mean_co2e, g.sigma_co2e, n_points)
    return out


# --- yield ----------------------------------------------------------------------

DateWindow = tuple[_dt.date | None, _dt.date | None]


def defect_values_in_window(node: TechNode, window: DateWindow | None) -> np.ndarray:
    start, end = window if window is not None else (None, None)
    vals = [
        d0
        for date, d0 in node.defect_series
        if (start is None or date >= start) and (end is None or date <= end)
    ]
    if not vals:
        raise EmptyDefectWindowError(f"{node.name}: no defect records in window {window!r}")
    return np.array(vals)


def build_defect_distribution(
    node: TechNode,
    window: DateWindow | None = None,
    n_points: int = DEFAULT_GRID_POINTS,
    bandwidth: float | str = "scott",
) -> Distribution:
    """Equal-weight KDE over in-window defect densities, truncated at 0."""
    values = defect_values_in_window(node, window)
    if values.size == 1 or np.ptp(values) == 0.0:
        return PointMass(float(values[0]))
    kin = KdeInput(points=values, bandwidth=bandwidth)
    return kde_fit(kin, default_grid(kin, n_points)).truncated(lo=0.0)


def poisson_yield(d0, area_cm2):
    """The Poisson yield kernel ``exp(-D0 * A)``; exact for scalars and arrays."""
    return np.exp(-np.asarray(d0) * area_cm2) if np.ndim(d0) else float(np.exp(-d0 * area_cm2))


def build_yield_distribution(
    node: TechNode,
    area_cm2: float,
    window: DateWindow | None = None,
    n_points: int = DEFAULT_GRID_POINTS,
    bandwidth: float | str = "scott",
) -> Distribution:
    """Yield distribution for a die of ``area_cm2`` on this node.

    The defect-density KDE is transformed through ``Y = exp(-D0 * A)`` by
    change of variables on the grid (the transform is monotone, so the yield
    marginal stays exact up to grid resolution); support lies in (0, 1].
    """
    if area_cm2 <= 0.0:
        raise NonPositiveAreaError(f"area must be > 0 cm2, got {area_cm2}")
    d0_dist = build_defect_distribution(node, window, n_points, bandwidth)
    if isinstance(d0_dist, PointMass):
        return PointMass(poisson_yield(d0_dist.value, area_cm2))
    d_lo, d_hi = d0_dist.x_min, d0_dist.x_max  # d_lo >= 0 after truncation
    y_lo = float(np.exp(-d_hi * area_cm2))
    y_hi = float(np.exp(-d_lo * area_cm2))
    y = np.linspace(y_lo, y_hi, n_points)
    d0_of_y = -np.log(y) / area_cm2
    f_d0 = np.interp(d0_of_y, d0_dist.x, d0_dist.density)
    density = f_d0 / (area_cm2 * y)
    return GridDistribution.from_unnormalized(y_lo, y_hi, density)


# --- carbon intensity ------------------------------------------------------------


def build_ci_distribution(
    histories: Sequence[RegionCIHistory],
    weights: Sequence[float],
    n_points: int = DEFAULT_GRID_POINTS,
    bandwidth: float | str = "scott",
) -> GridDistribution:
    """Capacity-weighted mixture of per-region KDEs (g CO2e/kWh).

    Every record of region ``r`` carries weight ``share_r / record_count_r``,
    so a region's total kernel mass equals its share regardless of how finely
    its history is sampled.  Rule bandwidths are resolved per region from
    that region's own records; a pooled bandwidth would smear each region's
    kernels by the between-region spread.
    """
    if len(histories) != len(weights):
        raise MismatchedLengthsError(f"{len(histories)} histories vs {len(weights)} weights")
    if not histories:
        raise ValidationError("need at least one CI history")
    total = float(sum(weights))
    if abs(total - 1.0) > SHARE_TOL:
        raise SharesDontSumToOneError(f"shares sum to {total!r}")

    region_points = [h.values() for h in histories]
    if isinstance(bandwidth, str):
        bandwidths = [KdeInput(points=pts, bandwidth=bandwidth).bandwidth_value() for pts in region_points]
    else:
        bandwidths = [float(bandwidth)] * len(histories)

    lo = min(float(p.min()) - KERNEL_SPAN_SIGMAS * h for p, h in zip(region_points, bandwidths))
    hi = max(float(p.max()) + KERNEL_SPAN_SIGMAS * h for p, h in zip(region_points, bandwidths))
    x = np.linspace(lo, hi, n_points)
    density = np.zeros(n_points)
    for pts, share, h in zip(region_points, weights, bandwidths):
        density += kde_density(pts, np.full(pts.size, share / pts.size), h, x)
    dist = GridDistribution.from_unnormalized(lo, hi, density)
    return dist.truncated(lo=0.0)


# --- utilization ------------------------------------------------------------------


def build_utilization_distribution(
    samples: Sequence[float],
    weights: Sequence[float] | None = None,
    n_points: int = DEFAULT_GRID_POINTS,
    bandwidth: float | str = "scott",
) -> Distribution:
    """KDE over utilization fractions, truncated to [0, 1]."""
    values = np.asarray(samples, dtype=np.float64)
    if values.size == 0:
        raise ValidationError("utilization sample list is empty")
    if np.any(values < 0.0) or np.any(values > 1.0):
        bad = values[(values < 0.0) | (values > 1.0)][0]
        raise SampleOutOfUnitIntervalError(f"utilization {bad!r} outside [0, 1]")
    if np.ptp(values) == 0.0:
        return PointMass(float(values[0]))
    w = None if weights is None else np.asarray(weights, dtype=np.float64)
    kin = KdeInput(points=values, weights=w, bandwidth=bandwidth)
    return kde_fit(kin, default_grid(kin, n_points)).truncated(lo=0.0, hi=1.0)
