"""Carbon-footprint composition for monolithic and chiplet designs.

The governing relation, per technology node and die area::

    CPA = (CI_fab * EPA + GPA + MPA) / Y        [kg CO2e per cm2 of good die]
    E   = sum over chiplets of count * area * CPA(node, area)

CI enters in g CO2e/kWh and is converted to kg here, at the model boundary.
Within one design, all chiplets of a node share the same per-trial draw of
that node's fab conditions (CI, EPA, GPA, and the defect density D0 behind
each chiplet's yield ``exp(-D0 * area)``); chiplets on different nodes draw
independently.  A ``shared_draws=False`` switch exists for sensitivity runs.

Operational carbon multiplies device power by lifetime utilization and
use-phase grid intensity; the embodied-to-operational weight ``alpha`` is the
embodied share of lifetime emissions, compared against the fixed bands
assumed by prior comparative models.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    LengthMismatchError,
    UnknownNodeError,
    ValidationError,
    YieldSupportAtZeroError,
    ZeroTotalSampleError,
)
from .grid import DEFAULT_GRID_POINTS, Distribution, GridDistribution, PointMass, grid_from_samples
from .params import (
    DateWindow,
    RegionCIHistory,
    TechNode,
    build_ci_distribution,
    build_defect_distribution,
    build_epa_distribution,
    build_gpa_distribution,
    build_yield_distribution,
    defect_values_in_window,
)
from .propagate import Const, Div, ExpNegMul, Expr, Input, PropagationExpr, Scale, propagate_mc
from .sampling import SampleSet
from .summary import DEFAULT_QUANTILES, CarbonSummary, summarize

#: Fixed embodied-to-operational bands assumed by comparative analytical
#: models: (center, half-width) of the embodied-dominated and
#: operational-dominated regimes.  Reported alongside alpha summaries.
ALPHA_BAND_EMBODIED_DOMINATED = (0.8, 0.1)
ALPHA_BAND_OPERATIONAL_DOMINATED = (0.2, 0.1)

HOURS_PER_YEAR = 8766.0  # mean Gregorian year

#: Per-cm2 views use yield at this reference die area unless told otherwise.
REFERENCE_AREA_CM2 = 1.0

#: Stochastic sources per node.  "D0" is the defect density; design-level
#: yields derive from it per chiplet area.
PARAM_KINDS = ("CI", "EPA", "GPA", "D0")

#: Source names used in diagnosis reports ("Yield" is the public face of D0).
DIAGNOSIS_SOURCES = ("EPA", "GPA", "Yield", "CI")
_DIAG_TO_KIND = {"EPA": "EPA", "GPA": "GPA", "CI": "CI", "Yield": "D0"}

#: Defect records come from a trailing window of this many calendar years
#: ending at the design's as-of year.
DEFECT_WINDOW_YEARS = 3


@dataclass(frozen=True)
class MonteCarlo:
    """Trial count, seed, and worker setting for one propagation run."""

    n: int = 1_000_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"mc.n must be >= 1, got {self.n}")
        if self.seed < 0:
            raise ValidationError(f"mc.seed must be unsigned, got {self.seed}")


@dataclass(frozen=True)
class ChipletSpec:
    node: TechNode
    area_cm2: float
    count: int = 1

    def __post_init__(self):
        if self.area_cm2 <= 0.0:
            raise ValidationError(f"chiplet area must be > 0, got {self.area_cm2}")
        if self.count < 1:
            raise ValidationError(f"chiplet count must be >= 1, got {self.count}")


@dataclass(frozen=True)
class DesignSpec:
    """A chip design as chiplets; a monolithic die is a single entry."""

    name: str
    chiplets: tuple[ChipletSpec, ...]
    as_of_year: int

    def __post_init__(self):
        if not self.chiplets:
            raise ValidationError(f"{self.name}: design needs at least one chiplet")
        object.__setattr__(self, "chiplets", tuple(self.chiplets))

    def total_area_cm2(self) -> float:
        return sum(c.count * c.area_cm2 for c in self.chiplets)


@dataclass(frozen=True)
class OperationalProfile:
    """Use-phase model: power, lifetime, utilization, and grid intensity."""

    tdp_watts: float
    lifetime_years: float
    utilization: Distribution
    ci_use: Distribution  # g CO2e per kWh

    def __post_init__(self):
        if self.tdp_watts <= 0.0:
            raise ValidationError(f"tdp must be > 0 W, got {self.tdp_watts}")
        if self.lifetime_years <= 0.0:
            raise ValidationError(f"lifetime must be > 0 years, got {self.lifetime_years}")


class CarbonResult(NamedTuple):
    samples: SampleSet
    summary: CarbonSummary


# --- per-node parameter sources -------------------------------------------------


def design_defect_window(node: TechNode, as_of_year: int) -> DateWindow:
    """Trailing defect window for a design vintage.

    Records from the ``DEFECT_WINDOW_YEARS`` calendar years ending at the
    as-of year; if the node's series stops earlier, the window opens at the
    most recent record so the latest known state is always used.
    """
    end = _dt.date(as_of_year, 12, 31)
    start = _dt.date(as_of_year - (DEFECT_WINDOW_YEARS - 1), 1, 1)
    if any(start <= d <= end for d, _ in node.defect_series):
        return (start, end)
    earlier = [d for d, _ in node.defect_series if d <= end]
    if earlier:
        return (max(earlier), end)
    return (start, end)  # empty; the builder raises its own precise error


def node_parameter_sources(
    node: TechNode,
    as_of_year: int,
    ci_histories: Mapping[str, RegionCIHistory],
    defect_window: DateWindow | None = None,
    n_points: int = DEFAULT_GRID_POINTS,
    overrides: Mapping[str, Distribution] | None = None,
) -> dict[str, Distribution]:
    """Build the four stochastic sources for one node.

    Returns ``{"CI": ..., "EPA": ..., "GPA": ..., "D0": ...}`` with CI in
    g CO2e/kWh.  ``overrides`` replaces sources by kind (``"EPA"``) or by
    kind and node (``"EPA:7nm"``); node-qualified entries win.
    """
    overrides = overrides or {}

    def pick(kind: str, build):
        for key in (f"{kind}:{node.name}", kind):
            if key in overrides:
                return overrides[key]
        return build()

    def build_ci():
        if not node.capacity_shares:
            raise ValidationError(f"{node.name}: no capacity shares; cannot locate fab power grid")
        missing = [r for r, _ in node.capacity_shares if r not in ci_histories]
        if missing:
            raise UnknownNodeError(f"{node.name}: no CI history for region(s) {', '.join(missing)}")
        hists = [ci_histories[r] for r, _ in node.capacity_shares]
        return build_ci_distribution(hists, [s for _, s in node.capacity_shares], n_points)

    window = defect_window if defect_window is not None else design_defect_window(node, as_of_year)
    return {
        "CI": pick("CI", build_ci),
        "EPA": pick("EPA", lambda: build_epa_distribution(node, as_of_year, n_points)),
        "GPA": pick("GPA", lambda: build_gpa_distribution(node, n_points)),
        "D0": pick("D0", lambda: build_defect_distribution(node, window, n_points)),
    }


def _input_name(kind: str, node: TechNode, qualifier: str = "") -> str:
    return f"{kind.lower()}:{node.name}{qualifier}"


# --- CPA ------------------------------------------------------------------------


def cpa_distribution(
    node: TechNode,
    ci_histories: Mapping[str, RegionCIHistory],
    mc: MonteCarlo,
    area_cm2: float = REFERENCE_AREA_CM2,
    as_of_year: int | None = None,
    defect_window: DateWindow | None = None,
    n_points: int = DEFAULT_GRID_POINTS,
    overrides: Mapping[str, Distribution] | None = None,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    thresholds: Sequence[float] = (),
) -> CarbonResult:
    """Carbon per cm2 of good die for one node: ``(CI*EPA + GPA + MPA) / Y``.

    The yield divisor is the yield distribution at ``area_cm2`` (override key
    ``"Yield"``); design-level composition instead shares defect-density
    draws across chiplets.  ``as_of_year`` defaults to the node's anchor year.
    """
    overrides = overrides or {}
    year = as_of_year if as_of_year is not None else node.epa_anchor_year
    sources = node_parameter_sources(node, year, ci_histories, defect_window, n_points, overrides)
    window = defect_window if defect_window is not None else design_defect_window(node, year)

    yield_source = None
    for key in (f"Yield:{node.name}", "Yield"):
        if key in overrides:
            yield_source = overrides[key]
            break
    if yield_source is None:
        yield_source = build_yield_distribution(node, area_cm2, window, n_points)
    lo = float(yield_source) if isinstance(yield_source, (int, float)) else yield_source.support()[0]
    if lo <= 0.0:
        raise YieldSupportAtZeroError(f"{node.name}: yield support reaches {lo}; carbon would diverge")

    ci_kg = Scale(Input("ci"), 1e-3)  # g -> kg CO2e per kWh
    expr = Div(ci_kg * Input("epa") + Input("gpa") + Const(node.mpa), Input("yield"))
    prop = PropagationExpr(
        root=expr,
        inputs={"ci": sources["CI"], "epa": sources["EPA"], "gpa": sources["GPA"], "yield": yield_source},
    )
    samples = propagate_mc(prop, mc.n, mc.seed, mc.workers, label=f"cpa:{node.name}")
    return CarbonResult(samples, summarize(samples, quantiles, thresholds))


def deterministic_cpa_point(
    node: TechNode,
    ci_histories: Mapping[str, RegionCIHistory],
    area_cm2: float = REFERENCE_AREA_CM2,
    as_of_year: int | None = None,
    defect_window: DateWindow | None = None,
) -> float:
    """Deterministic point estimate in the style of prior carbon models.

    Uses the anchor-year characterization EPA, mean gas emissions, the
    capacity-weighted average grid intensity, and the most recent in-window
    defect density.
    """
    year = as_of_year if as_of_year is not None else node.epa_anchor_year
    window = defect_window if defect_window is not None else design_defect_window(node, year)
    ci_g = sum(share * float(ci_histories[r].values().mean()) for r, share in node.capacity_shares)
    gpa = sum(g.mean_co2e for g in node.gas_inventory)
    d0 = float(defect_values_in_window(node, window)[-1])
    y = float(np.exp(-d0 * area_cm2))
    return (ci_g / 1e3 * node.epa_base + gpa + node.mpa) / y


# --- embodied -------------------------------------------------------------------


def embodied_expression(
    design: DesignSpec,
    ci_histories: Mapping[str, RegionCIHistory],
    shared_draws: bool = True,
    defect_window: DateWindow | None = None,
    n_points: int = DEFAULT_GRID_POINTS,
    overrides: Mapping[str, Distribution] | None = None,
) -> PropagationExpr:
    """Expression for a design's total embodied carbon (kg CO2e per instance).

    With ``shared_draws`` every chiplet of a node references the same named
    inputs (one draw of fab conditions per node per trial); without it each
    chiplet gets its own independent copies.
    """
    inputs: dict[str, Distribution] = {}
    terms: list[Expr] = []
    sources_cache: dict[str, dict[str, Distribution]] = {}

    for idx, chiplet in enumerate(design.chiplets):
        node = chiplet.node
        if node.name not in sources_cache:
            sources_cache[node.name] = node_parameter_sources(
                node, design.as_of_year, ci_histories, defect_window, n_points, overrides
            )
        sources = sources_cache[node.name]
        qualifier = "" if shared_draws else f"#{idx}"
        names = {kind: _input_name(kind, node, qualifier) for kind in PARAM_KINDS}
        for kind in PARAM_KINDS:
            inputs.setdefault(names[kind], sources[kind])
        base = Scale(Input(names["CI"]), 1e-3) * Input(names["EPA"]) + Input(names["GPA"]) + Const(node.mpa)
        per_die = Div(base, ExpNegMul(Input(names["D0"]), Const(chiplet.area_cm2)))
        terms.append(Scale(per_die, chiplet.count * chiplet.area_cm2))

    root = terms[0]
    for term in terms[1:]:
        root = root + term
    return PropagationExpr(root=root, inputs=inputs)


def embodied_distribution(
    design: DesignSpec,
    ci_histories: Mapping[str, RegionCIHistory],
    mc: MonteCarlo,
    shared_draws: bool = True,
    defect_window: DateWindow | None = None,
    n_points: int = DEFAULT_GRID_POINTS,
    overrides: Mapping[str, Distribution] | None = None,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    thresholds: Sequence[float] = (),
) -> CarbonResult:
    """Total embodied carbon distribution of a design (kg CO2e per instance)."""
    expr = embodied_expression(design, ci_histories, shared_draws, defect_window, n_points, overrides)
    samples = propagate_mc(expr, mc.n, mc.seed, mc.workers, label=f"embodied:{design.name}")
    return CarbonResult(samples, summarize(samples, quantiles, thresholds))


# --- operational ----------------------------------------------------------------


def operational_distribution(
    profile: OperationalProfile,
    mc: MonteCarlo,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    thresholds: Sequence[float] = (),
    label: str = "operational",
) -> CarbonResult:
    """Lifetime use-phase carbon: ``tdp * u * lifetime_hours * ci`` in kg CO2e.

    Utilization and grid intensity are drawn independently each trial; the
    1e-6 factor converts W to kW and g CO2e to kg CO2e.
    """
    factor = profile.tdp_watts * profile.lifetime_years * HOURS_PER_YEAR * 1e-6
    expr = Scale(Input("utilization") * Input("ci_use"), factor)
    prop = PropagationExpr(root=expr, inputs={"utilization": profile.utilization, "ci_use": profile.ci_use})
    samples = propagate_mc(prop, mc.n, mc.seed, mc.workers, label=label)
    return CarbonResult(samples, summarize(samples, quantiles, thresholds))


# --- total and alpha --------------------------------------------------------------


def total_and_alpha(
    embodied: SampleSet,
    operational: SampleSet,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    thresholds: Sequence[float] = (),
) -> tuple[CarbonResult, CarbonResult]:
    """Lifetime total and the embodied share ``alpha = e / (e + o)`` per trial.

    The inputs must be independent draws of equal length (use distinct
    seeds).  Any trial with ``e + o == 0`` is rejected, so alpha lies in
    (0, 1).
    """
    if len(embodied) != len(operational):
        raise LengthMismatchError(f"embodied n={len(embodied)} vs operational n={len(operational)}")
    e, o = embodied.values, operational.values
    totals = e + o
    if np.any(totals == 0.0):
        raise ZeroTotalSampleError("some trials have zero total carbon; alpha undefined")
    alpha = e / totals
    total_set = SampleSet(values=totals, seed=embodied.seed, label="total")
    alpha_set = SampleSet(values=alpha, seed=embodied.seed, label="alpha")
    return (
        CarbonResult(total_set, summarize(total_set, quantiles, thresholds)),
        CarbonResult(alpha_set, summarize(alpha_set, quantiles, thresholds)),
    )


def alpha_comparison_bands() -> dict[str, dict[str, float]]:
    """The fixed embodied/operational-dominated bands used by prior models."""
    return {
        "embodied_dominated": {
            "center": ALPHA_BAND_EMBODIED_DOMINATED[0],
            "half_width": ALPHA_BAND_EMBODIED_DOMINATED[1],
        },
        "operational_dominated": {
            "center": ALPHA_BAND_OPERATIONAL_DOMINATED[0],
            "half_width": ALPHA_BAND_OPERATIONAL_DOMINATED[1],
        },
    }


# --- uncertainty-source diagnosis --------------------------------------------------


@dataclass(frozen=True)
class DiagnosisReport:
    """Per-source conditional distributions for a design.

    Each entry keeps one source stochastic and holds the other three at the
    mean of their distributions.  ``variance_note`` records that conditional
    variances need not sum to the full-model variance because CI and EPA
    combine multiplicatively.
    """

    conditionals: dict[str, GridDistribution]
    summaries: dict[str, CarbonSummary]
    ranking: tuple[str, ...]
    full_summary: CarbonSummary
    conditional_variance_sum: float
    variance_note: str = (
        "conditional variances need not sum to the full-model variance; "
        "the CI*EPA term is multiplicative"
    )

    def to_json_dict(self) -> dict:
        return {
            "ranking_by_variance": list(self.ranking),
            "summaries": {k: s.to_json_dict() for k, s in self.summaries.items()},
            "full_model": self.full_summary.to_json_dict(),
            "conditional_variance_sum": self.conditional_variance_sum,
            "variance_note": self.variance_note,
        }


def _source_mean(source: Distribution) -> float:
    return float(source) if isinstance(source, (int, float)) else float(source.mean())


def diagnose_sources(
    design: DesignSpec,
    ci_histories: Mapping[str, RegionCIHistory],
    mc: MonteCarlo,
    defect_window: DateWindow | None = None,
    n_points: int = DEFAULT_GRID_POINTS,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    overrides: Mapping[str, Distribution] | None = None,
) -> DiagnosisReport:
    """Attribute embodied-carbon uncertainty to EPA, GPA, Yield, and CI.

    For each source, rerun the design with every other source pinned to a
    point mass at its distribution mean ("Yield" pins the defect density, so
    every chiplet's yield is fixed at ``exp(-mean_D0 * area)``).  User
    ``overrides`` replace the baseline sources before means are taken.
    """
    overrides = dict(overrides or {})
    means: dict[str, float] = {}
    for chiplet in design.chiplets:
        node = chiplet.node
        if f"CI:{node.name}" in means:
            continue
        sources = node_parameter_sources(
            node, design.as_of_year, ci_histories, defect_window, n_points, overrides
        )
        for kind in PARAM_KINDS:
            means[f"{kind}:{node.name}"] = _source_mean(sources[kind])

    conditionals: dict[str, GridDistribution] = {}
    summaries: dict[str, CarbonSummary] = {}
    for source in DIAGNOSIS_SOURCES:
        kept = _DIAG_TO_KIND[source]
        pinned = dict(overrides)
        pinned.update(
            {key: PointMass(value) for key, value in means.items() if not key.startswith(f"{kept}:")}
        )
        result = embodied_distribution(
            design, ci_histories, mc, defect_window=defect_window,
            n_points=n_points, overrides=pinned, quantiles=quantiles,
        )
        conditionals[source] = grid_from_samples(result.samples.values, n_points)
        summaries[source] = result.summary

    full = embodied_distribution(
        design, ci_histories, mc, defect_window=defect_window,
        n_points=n_points, overrides=overrides, quantiles=quantiles,
    )
    ranking = tuple(sorted(DIAGNOSIS_SOURCES, key=lambda k: summaries[k].variance, reverse=True))
    return DiagnosisReport(
        conditionals=conditionals,
        summaries=summaries,
        ranking=ranking,
        full_summary=full.summary,
        conditional_variance_sum=sum(s.variance for s in summaries.values()),
    )
