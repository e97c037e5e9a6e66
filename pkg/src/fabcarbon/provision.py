"""Risk-constrained provisioning under an embodied-carbon budget.

Given candidate designs with externally supplied performance numbers, pick
the highest-performing design whose probability of exceeding the carbon
budget stays within the risk tolerance.  The report also shows what a
mean-estimate picker and a worst-case picker would have chosen, with their
realized exceedance risks, so the cost of both over-optimism and
over-conservatism is visible side by side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .carbon import DesignSpec, MonteCarlo, embodied_distribution
from .errors import NonPositiveSideError, ValidationError
from .grid import DEFAULT_GRID_POINTS
from .params import RegionCIHistory
from .rng import derive_seed
from .summary import CarbonSummary, summarize


def scale_accelerator_area(
    side: int,
    base_side: int,
    base_systolic_cm2: float,
    base_buffer_cm2: float,
) -> float:
    """Die area of a resized systolic-array accelerator, in cm2.

    The compute array scales quadratically with side length and the buffers
    linearly: ``systolic * (side/base)^2 + buffer * (side/base)``.
    """
    if side < 1 or base_side < 1:
        raise NonPositiveSideError(f"sides must be >= 1, got side={side}, base_side={base_side}")
    if base_systolic_cm2 < 0.0 or base_buffer_cm2 < 0.0:
        raise ValidationError("base areas must be >= 0")
    ratio = side / base_side
    return base_systolic_cm2 * ratio**2 + base_buffer_cm2 * ratio


@dataclass(frozen=True)
class Candidate:
    design: DesignSpec
    performance: float  # normalized, supplied externally
    label: str
    power_watts: float | None = None

    def __post_init__(self):
        if self.performance < 0.0:
            raise ValidationError(f"{self.label}: performance must be >= 0")


@dataclass(frozen=True)
class ProvisionPolicy:
    """Carbon budget, acceptable exceedance risk, and the estimator to report.

    ``estimator`` picks which single-number carbon estimate the report
    highlights: ``("percentile", q)``, ``("mean",)``, or
    ``("worst_case", q_hi)``.  Selection itself always enforces the chance
    constraint ``P(E > budget) <= risk``.
    """

    budget_kgco2: float
    risk: float
    estimator: tuple = ("percentile", 0.95)

    def __post_init__(self):
        if self.budget_kgco2 <= 0.0:
            raise ValidationError(f"budget must be > 0, got {self.budget_kgco2}")
        if not 0.0 < self.risk < 1.0:
            raise ValidationError(f"risk must be in (0, 1), got {self.risk}")
        kind = self.estimator[0]
        if kind not in ("percentile", "mean", "worst_case"):
            raise ValidationError(f"unknown estimator {self.estimator!r}")
        if kind in ("percentile", "worst_case"):
            q = self.estimator[1]
            if not 0.0 < q < 1.0:
                raise ValidationError(f"estimator quantile must be in (0, 1), got {q}")


def wilson_interval(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    phat = successes / n
    denom = 1.0 + z**2 / n
    center = (phat + z**2 / (2 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z**2 / (4 * n**2)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True)
class CandidateReport:
    label: str
    performance: float
    summary: CarbonSummary
    p_exceed: float
    p_exceed_ci95: tuple[float, float]
    estimate: float  # carbon number under the policy's estimator
    worst_case_estimate: float  # high-quantile carbon number
    feasible: bool

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "performance": self.performance,
            "summary": self.summary.to_json_dict(),
            "p_exceed": self.p_exceed,
            "p_exceed_ci95": list(self.p_exceed_ci95),
            "estimate": self.estimate,
            "worst_case_estimate": self.worst_case_estimate,
            "feasible": self.feasible,
        }


@dataclass(frozen=True)
class ProvisionReport:
    """Per-candidate statistics plus the three selections and their deltas."""

    policy: ProvisionPolicy
    candidates: tuple[CandidateReport, ...]
    selected: str | None  # chance-constrained choice
    mean_selection: str | None  # argmax performance with mean <= budget
    worst_case_selection: str | None  # argmax performance with q_hi percentile <= budget
    worst_case_quantile: float
    comparison: dict

    def to_json_dict(self) -> dict:
        return {
            "budget_kgco2": self.policy.budget_kgco2,
            "risk": self.policy.risk,
            "estimator": list(self.policy.estimator),
            "candidates": [c.to_json_dict() for c in self.candidates],
            "selected": self.selected,
            "mean_selection": self.mean_selection,
            "worst_case_selection": self.worst_case_selection,
            "worst_case_quantile": self.worst_case_quantile,
            "comparison": self.comparison,
        }

    def to_csv_text(self) -> str:
        lines = ["label,performance,mean,std,variance,p50,p95,estimate,p_exceed,feasible,selected"]
        for c in self.candidates:
            lines.append(
                f"{c.label},{c.performance!r},{c.summary.mean!r},{c.summary.std!r},"
                f"{c.summary.variance!r},{c.summary.percentiles.get(0.5)!r},"
                f"{c.summary.percentiles.get(0.95)!r},{c.estimate!r},{c.p_exceed!r},"
                f"{int(c.feasible)},{int(c.label == self.selected)}"
            )
        return "\n".join(lines) + "\n"


def _estimate(policy: ProvisionPolicy, summary: CarbonSummary, quantile_of) -> float:
    kind = policy.estimator[0]
    if kind == "mean":
        return summary.mean
    return quantile_of(policy.estimator[1])


def _argmax_performance(reports: Sequence[CandidateReport], eligible) -> str | None:
    pool = [r for r in reports if eligible(r)]
    if not pool:
        return None
    # deterministic total order: performance desc, then tighter risk, then
    # lower mean, then label — provisioning is invariant to input order
    best = min(pool, key=lambda r: (-r.performance, r.p_exceed, r.summary.mean, r.label))
    return best.label


def provision(
    candidates: Sequence[Candidate],
    policy: ProvisionPolicy,
    ci_histories: Mapping[str, RegionCIHistory],
    mc: MonteCarlo,
    worst_case_quantile: float = 0.999,
    n_points: int = DEFAULT_GRID_POINTS,
    embodied_samples: Mapping[str, np.ndarray] | None = None,
) -> ProvisionReport:
    """Evaluate candidates against the policy and pick the risk-aware winner.

    Each candidate's embodied distribution runs on its own seed derived from
    ``(mc.seed, label)``, so the report does not depend on candidate order.
    ``embodied_samples`` can inject precomputed per-label sample arrays
    (used by tests with analytic distributions).
    """
    if not candidates:
        raise ValidationError("need at least one candidate")
    labels = [c.label for c in candidates]
    if len(set(labels)) != len(labels):
        raise ValidationError("candidate labels must be unique")

    reports = []
    for cand in sorted(candidates, key=lambda c: c.label):
        if embodied_samples is not None and cand.label in embodied_samples:
            values = np.asarray(embodied_samples[cand.label], dtype=np.float64)
            summary = summarize(values, quantiles=(0.5, 0.95), thresholds=(policy.budget_kgco2,))
        else:
            sub_mc = MonteCarlo(n=mc.n, seed=derive_seed(mc.seed, cand.label), workers=mc.workers)
            result = embodied_distribution(
                cand.design, ci_histories, sub_mc, n_points=n_points,
                quantiles=(0.5, 0.95), thresholds=(policy.budget_kgco2,),
            )
            values = result.samples.values
            summary = result.summary
        exceed_count = int(np.count_nonzero(values > policy.budget_kgco2))
        p_exceed = exceed_count / values.size

        def quantile_of(q, values=values):
            return float(np.quantile(values, q, method="linear"))

        reports.append(
            CandidateReport(
                label=cand.label,
                performance=cand.performance,
                summary=summary,
                p_exceed=p_exceed,
                p_exceed_ci95=wilson_interval(exceed_count, values.size),
                estimate=_estimate(policy, summary, quantile_of),
                worst_case_estimate=quantile_of(worst_case_quantile),
                feasible=p_exceed <= policy.risk,
            )
        )

    perf = {c.label: c.performance for c in candidates}
    by_label = {r.label: r for r in reports}

    selected = _argmax_performance(reports, lambda r: r.feasible)
    mean_sel = _argmax_performance(reports, lambda r: r.summary.mean <= policy.budget_kgco2)
    wc_sel = _argmax_performance(reports, lambda r: r.worst_case_estimate <= policy.budget_kgco2)

    def perf_delta(a: str | None, b: str | None) -> float | None:
        if a is None or b is None or perf[b] == 0.0:
            return None
        return perf[a] / perf[b] - 1.0

    comparison = {
        "risk_aware_vs_worst_case_performance_gain": perf_delta(selected, wc_sel),
        "risk_aware_vs_mean_performance_gain": perf_delta(selected, mean_sel),
        "mean_selection_p_exceed": by_label[mean_sel].p_exceed if mean_sel else None,
        "worst_case_selection_p_exceed": by_label[wc_sel].p_exceed if wc_sel else None,
        "selected_p_exceed": by_label[selected].p_exceed if selected else None,
        "no_feasible_candidate": selected is None,
    }
    return ProvisionReport(
        policy=policy,
        candidates=tuple(reports),
        selected=selected,
        mean_selection=mean_sel,
        worst_case_selection=wc_sel,
        worst_case_quantile=worst_case_quantile,
        comparison=comparison,
    )
