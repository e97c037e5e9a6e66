"""Declarative scenarios: parse, validate, run, and write artifacts.

A scenario is one TOML document that names the dataset bundle, the analysis
to run, and the analysis body (nodes, designs, operational profiles, or
provisioning candidates).  Running a scenario writes, into the output
directory:

* ``summary.json``   — per-target summaries (sorted keys, reproducible text)
* ``<target>.dist.csv`` / ``.dist.json`` — one plot-ready grid per distribution
* ``run.json``       — seed, sample count, bundle and tool versions

Outputs are byte-identical for identical (scenario, seed, samples) and for
any worker count; nothing here mutates the bundle.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .carbon import (
    ChipletSpec,
    DesignSpec,
    MonteCarlo,
    OperationalProfile,
    alpha_comparison_bands,
    cpa_distribution,
    deterministic_cpa_point,
    diagnose_sources,
    embodied_distribution,
    operational_distribution,
    total_and_alpha,
)
from .errors import NoFeasibleCandidateError, ScenarioError
from .grid import DEFAULT_GRID_POINTS, GridDistribution, grid_from_samples
from .ingest import DatasetBundle, load_bundle
from .params import build_ci_distribution, build_utilization_distribution
from .provision import Candidate, ProvisionPolicy, provision, scale_accelerator_area
from .rng import derive_seed
from .summary import DEFAULT_QUANTILES

ANALYSES = ("cpa", "embodied", "total", "alpha", "provision", "diagnose")


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario file plus any command-line overrides."""

    path: Path
    analysis: str
    dataset_root: Path
    seed: int
    samples: int
    grid_points: int
    output_dir: Path
    quantiles: tuple[float, ...]
    thresholds: tuple[float, ...]
    out_format: str  # "csv" | "json"
    workers: int
    body: dict[str, Any] = field(default_factory=dict)


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ScenarioError(f"{where}: missing required key {key!r}")
    return table[key]


def parse_scenario(path: str | Path, overrides: dict[str, Any] | None = None) -> Scenario:
    """Parse a scenario file, applying CLI overrides (seed, samples, ...).

    ``seed`` and ``samples`` must be present in the file or supplied as
    overrides; there are no hidden defaults for them.
    """
    path = Path(path)
    overrides = dict(overrides or {})
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: invalid TOML: {exc}") from None

    run = doc.get("run")
    if not isinstance(run, dict):
        raise ScenarioError(f"{path}: missing [run] table")
    analysis = _require(run, "analysis", "[run]")
    if analysis not in ANALYSES:
        raise ScenarioError(f"[run].analysis must be one of {ANALYSES}, got {analysis!r}")

    seed = overrides.get("seed", run.get("seed"))
    samples = overrides.get("samples", run.get("samples"))
    if seed is None or samples is None:
        raise ScenarioError("seed and samples must be set in [run] or via --seed/--samples")
    if int(samples) < 1:
        raise ScenarioError(f"samples must be >= 1, got {samples}")

    dataset = Path(overrides.get("dataset", _require(run, "dataset", "[run]")))
    if not dataset.is_absolute():
        dataset = path.parent / dataset
    output = Path(overrides.get("out", run.get("output", "out")))
    if not output.is_absolute():
        output = Path.cwd() / output

    quantiles = tuple(float(q) for q in overrides.get("quantiles", run.get("quantiles", DEFAULT_QUANTILES)))
    thresholds = tuple(float(t) for t in run.get("thresholds", ()))
    out_format = overrides.get("format", run.get("format", "csv"))
    if out_format not in ("csv", "json"):
        raise ScenarioError(f"format must be csv or json, got {out_format!r}")

    body = {k: v for k, v in doc.items() if k != "run"}
    return Scenario(
        path=path,
        analysis=analysis,
        dataset_root=dataset,
        seed=int(seed),
        samples=int(samples),
        grid_points=int(overrides.get("grid", run.get("grid_points", DEFAULT_GRID_POINTS))),
        output_dir=output,
        quantiles=quantiles,
        thresholds=thresholds,
        out_format=out_format,
        workers=int(overrides.get("workers", run.get("workers", 1))),
        body=body,
    )


# --- body resolution -------------------------------------------------------------


def _resolve_design(table: dict, bundle: DatasetBundle, where: str) -> DesignSpec:
    name = _require(table, "name", where)
    as_of = int(_require(table, "as_of_year", where))
    chiplets = []
    for idx, ch in enumerate(_require(table, "chiplets", where)):
        node = bundle.node(str(_require(ch, "node", f"{where}.chiplets[{idx}]")))
        area = float(_require(ch, "area_cm2", f"{where}.chiplets[{idx}]"))
        # per-node-pair area scaling for ported blocks is a scenario input
        area *= float(ch.get("area_scale", 1.0))
        chiplets.append(ChipletSpec(node=node, area_cm2=area, count=int(ch.get("count", 1))))
    return DesignSpec(name=str(name), chiplets=tuple(chiplets), as_of_year=as_of)


def _designs_by_name(scenario: Scenario, bundle: DatasetBundle) -> dict[str, DesignSpec]:
    designs = {}
    for idx, table in enumerate(scenario.body.get("designs", [])):
        design = _resolve_design(table, bundle, f"[[designs]][{idx}]")
        if design.name in designs:
            raise ScenarioError(f"design {design.name!r} defined twice")
        designs[design.name] = design
    return designs


def _resolve_profile(table: dict, bundle: DatasetBundle, scenario: Scenario, where: str) -> OperationalProfile:
    util_name = str(_require(table, "utilization", where))
    if util_name not in bundle.utilization_sets:
        raise ScenarioError(f"{where}: unknown utilization set {util_name!r}")
    region = str(_require(table, "ci_region", where))
    if region not in bundle.ci_histories:
        raise ScenarioError(f"{where}: unknown CI region {region!r}")
    return OperationalProfile(
        tdp_watts=float(_require(table, "tdp_watts", where)),
        lifetime_years=float(_require(table, "lifetime_years", where)),
        utilization=build_utilization_distribution(
            bundle.utilization_sets[util_name], n_points=scenario.grid_points
        ),
        ci_use=build_ci_distribution([bundle.ci_histories[region]], [1.0], n_points=scenario.grid_points),
    )


# --- output helpers ----------------------------------------------------------------


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_dist(out_dir: Path, name: str, dist: GridDistribution, out_format: str) -> None:
    if out_format == "json":
        (out_dir / f"{name}.dist.json").write_text(dist.to_json_text() + "\n")
    else:
        (out_dir / f"{name}.dist.csv").write_text(dist.to_csv_text())


def _dist_of(samples_values, scenario: Scenario) -> GridDistribution:
    return grid_from_samples(samples_values, scenario.grid_points)


# --- analysis runners ----------------------------------------------------------------


def _run_cpa(scenario: Scenario, bundle: DatasetBundle, out_dir: Path) -> dict:
    targets = scenario.body.get("cpa", {}).get("targets")
    if not targets:
        raise ScenarioError("cpa analysis needs [[cpa.targets]] entries")
    results = {}
    for idx, t in enumerate(targets):
        where = f"[[cpa.targets]][{idx}]"
        node = bundle.node(str(_require(t, "node", where)))
        name = str(t.get("name", node.name))
        mc = MonteCarlo(n=scenario.samples, seed=derive_seed(scenario.seed, f"cpa:{name}"), workers=scenario.workers)
        result = cpa_distribution(
            node,
            bundle.ci_histories,
            mc,
            area_cm2=float(t.get("area_cm2", 1.0)),
            as_of_year=int(t["as_of_year"]) if "as_of_year" in t else None,
            n_points=scenario.grid_points,
            quantiles=scenario.quantiles,
            thresholds=scenario.thresholds,
        )
        _write_dist(out_dir, name, _dist_of(result.samples.values, scenario), scenario.out_format)
        results[name] = {
            "node": node.name,
            "summary": result.summary.to_json_dict(),
            "deterministic_point": deterministic_cpa_point(
                node,
                bundle.ci_histories,
                area_cm2=float(t.get("area_cm2", 1.0)),
                as_of_year=int(t["as_of_year"]) if "as_of_year" in t else None,
            ),
        }
    return {"targets": results}


def _run_embodied(scenario: Scenario, bundle: DatasetBundle, out_dir: Path) -> dict:
    designs = _designs_by_name(scenario, bundle)
    if not designs:
        raise ScenarioError("embodied analysis needs [[designs]] entries")
    results = {}
    for name, design in designs.items():
        mc = MonteCarlo(
            n=scenario.samples, seed=derive_seed(scenario.seed, f"embodied:{name}"), workers=scenario.workers
        )
        result = embodied_distribution(
            design, bundle.ci_histories, mc, n_points=scenario.grid_points,
            quantiles=scenario.quantiles, thresholds=scenario.thresholds,
        )
        _write_dist(out_dir, name, _dist_of(result.samples.values, scenario), scenario.out_format)
        results[name] = {
            "total_area_cm2": design.total_area_cm2(),
            "summary": result.summary.to_json_dict(),
        }
    return {"designs": results}


def _run_total_alpha(scenario: Scenario, bundle: DatasetBundle, out_dir: Path) -> dict:
    cases = scenario.body.get(scenario.analysis, {}).get("cases")
    if not cases:
        raise ScenarioError(f"{scenario.analysis} analysis needs [[{scenario.analysis}.cases]] entries")
    designs = _designs_by_name(scenario, bundle)
    results = {}
    for idx, case in enumerate(cases):
        where = f"[[{scenario.analysis}.cases]][{idx}]"
        name = str(_require(case, "name", where))
        design_name = str(_require(case, "design", where))
        if design_name not in designs:
            raise ScenarioError(f"{where}: unknown design {design_name!r}")
        profile = _resolve_profile(_require(case, "profile", where), bundle, scenario, where)

        mc_emb = MonteCarlo(
            n=scenario.samples, seed=derive_seed(scenario.seed, f"embodied:{name}"), workers=scenario.workers
        )
        mc_op = MonteCarlo(
            n=scenario.samples, seed=derive_seed(scenario.seed, f"operational:{name}"), workers=scenario.workers
        )
        embodied = embodied_distribution(
            designs[design_name], bundle.ci_histories, mc_emb, n_points=scenario.grid_points,
            quantiles=scenario.quantiles,
        )
        operational = operational_distribution(
            profile, mc_op, quantiles=scenario.quantiles, label=f"operational:{name}"
        )
        total, alpha = total_and_alpha(
            embodied.samples, operational.samples, quantiles=scenario.quantiles, thresholds=scenario.thresholds
        )
        _write_dist(out_dir, f"{name}.total", _dist_of(total.samples.values, scenario), scenario.out_format)
        _write_dist(out_dir, f"{name}.alpha", _dist_of(alpha.samples.values, scenario), scenario.out_format)
        results[name] = {
            "design": design_name,
            "embodied": embodied.summary.to_json_dict(),
            "operational": operational.summary.to_json_dict(),
            "total": total.summary.to_json_dict(),
            "alpha": alpha.summary.to_json_dict(),
        }
    return {"cases": results, "alpha_comparison_bands": alpha_comparison_bands()}


def _run_provision(scenario: Scenario, bundle: DatasetBundle, out_dir: Path) -> dict:
    section = scenario.body.get("provision")
    if not section:
        raise ScenarioError("provision analysis needs a [provision] table")
    designs = _designs_by_name(scenario, bundle)

    estimator_kind = str(section.get("estimator", "percentile"))
    if estimator_kind == "mean":
        estimator = ("mean",)
    elif estimator_kind == "percentile":
        estimator = ("percentile", float(section.get("estimator_q", 0.95)))
    elif estimator_kind == "worst_case":
        estimator = ("worst_case", float(section.get("estimator_q", 0.999)))
    else:
        raise ScenarioError(f"[provision].estimator must be percentile|mean|worst_case, got {estimator_kind!r}")
    policy = ProvisionPolicy(
        budget_kgco2=float(_require(section, "budget_kgco2", "[provision]")),
        risk=float(_require(section, "risk", "[provision]")),
        estimator=estimator,
    )

    candidates = []
    for idx, c in enumerate(_require(section, "candidates", "[provision]")):
        where = f"[[provision.candidates]][{idx}]"
        label = str(_require(c, "label", where))
        if "design" in c:
            if c["design"] not in designs:
                raise ScenarioError(f"{where}: unknown design {c['design']!r}")
            design = designs[c["design"]]
        elif "side" in c:
            # accelerator candidates: quadratic systolic + linear buffer scaling
            for key in ("base_side", "base_systolic_cm2", "base_buffer_cm2", "node", "as_of_year"):
                _require(section, key, "[provision] (accelerator scaling)")
            area = scale_accelerator_area(
                int(c["side"]), int(section["base_side"]),
                float(section["base_systolic_cm2"]), float(section["base_buffer_cm2"]),
            )
            node = bundle.node(str(section["node"]))
            design = DesignSpec(
                name=label,
                chiplets=(ChipletSpec(node=node, area_cm2=area, count=1),),
                as_of_year=int(section["as_of_year"]),
            )
        else:
            raise ScenarioError(f"{where}: needs a design reference or a systolic side")
        candidates.append(Candidate(design=design, performance=float(_require(c, "performance", where)), label=label))

    mc = MonteCarlo(n=scenario.samples, seed=scenario.seed, workers=scenario.workers)
    report = provision(
        candidates, policy, bundle.ci_histories, mc,
        worst_case_quantile=float(section.get("worst_case_q", 0.999)),
        n_points=scenario.grid_points,
    )
    (out_dir / "provision.csv").write_text(report.to_csv_text())
    return {"provision": report.to_json_dict()}


def _run_diagnose(scenario: Scenario, bundle: DatasetBundle, out_dir: Path) -> dict:
    section = scenario.body.get("diagnose")
    if not section:
        raise ScenarioError("diagnose analysis needs a [diagnose] table")
    designs = _designs_by_name(scenario, bundle)
    design_name = str(_require(section, "design", "[diagnose]"))
    if design_name not in designs:
        raise ScenarioError(f"[diagnose]: unknown design {design_name!r}")
    mc = MonteCarlo(
        n=scenario.samples, seed=derive_seed(scenario.seed, f"diagnose:{design_name}"), workers=scenario.workers
    )
    report = diagnose_sources(
        designs[design_name], bundle.ci_histories, mc,
        n_points=scenario.grid_points, quantiles=scenario.quantiles,
    )
    for source, dist in report.conditionals.items():
        _write_dist(out_dir, f"{design_name}.{source}", dist, scenario.out_format)
    return {"design": design_name, "diagnosis": report.to_json_dict()}


_RUNNERS = {
    "cpa": _run_cpa,
    "embodied": _run_embodied,
    "total": _run_total_alpha,
    "alpha": _run_total_alpha,
    "provision": _run_provision,
    "diagnose": _run_diagnose,
}


def run_scenario(scenario: Scenario) -> dict:
    """Run the scenario end to end; returns the summary payload."""
    bundle = load_bundle(scenario.dataset_root)
    _validate_references(scenario, bundle)
    out_dir = scenario.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    payload = {"analysis": scenario.analysis}
    payload.update(_RUNNERS[scenario.analysis](scenario, bundle, out_dir))
    _write_json(out_dir / "summary.json", payload)
    _write_json(
        out_dir / "run.json",
        {
            "scenario": scenario.path.name,
            "analysis": scenario.analysis,
            "seed": scenario.seed,
            "samples": scenario.samples,
            "grid_points": scenario.grid_points,
            "quantiles": list(scenario.quantiles),
            "bundle_name": bundle.name,
            "bundle_version": bundle.version,
            "tool_version": __version__,
        },
    )
    # infeasibility surfaces after all artifacts are on disk
    if scenario.analysis == "provision" and payload["provision"]["selected"] is None:
        raise NoFeasibleCandidateError("no candidate satisfies the risk constraint; see summary.json")
    return payload


def _validate_references(scenario: Scenario, bundle: DatasetBundle) -> None:
    """Resolve every node/design/profile reference before any compute runs."""
    designs = _designs_by_name(scenario, bundle)  # raises on unknown nodes
    if scenario.analysis == "cpa":
        for t in scenario.body.get("cpa", {}).get("targets", []):
            if "node" in t:
                bundle.node(str(t["node"]))
    if scenario.analysis in ("total", "alpha"):
        for case in scenario.body.get(scenario.analysis, {}).get("cases", []):
            design_name = case.get("design")
            if design_name is not None and design_name not in designs:
                raise ScenarioError(f"unknown design {design_name!r}")
    if scenario.analysis == "diagnose":
        section = scenario.body.get("diagnose", {})
        if section.get("design") is not None and section["design"] not in designs:
            raise ScenarioError(f"unknown design {section['design']!r}")
