#!/usr/bin/env python3
"""Regenerate the bundled dataset under data/.

Values anchored to public disclosures are transcribed directly (capacity
splits, warming potentials, the documented efficiency and defect-density
anchor points); everything else is a synthetic approximation shaped to match
the cited sources' reported levels and trends, and is flagged
``synthetic = true`` in provenance.toml.

Deterministic: reruns write byte-identical files.
"""

from __future__ import annotations

import datetime as dt
import math
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent / "data"

RNG_SEED = 20240810

# --- technology nodes -------------------------------------------------------------
# columns: epa_base (kWh/cm2 at anchor year), anchor, mass production year,
# mpa (kg CO2e/cm2), efficiency plateau P, efficiency rate r (per year)
NODES = {
    "28nm": dict(epa_base=0.95, anchor=2020, mp=2011, mpa=0.25, plateau=2.65, rate=math.log(33.0) / 3.0),
    "16nm": dict(epa_base=1.24, anchor=2020, mp=2015, mpa=0.25, plateau=2.2, rate=0.62),
    "14nm": dict(epa_base=1.30, anchor=2020, mp=2015, mpa=0.25, plateau=2.5, rate=0.60),
    "10nm": dict(epa_base=1.60, anchor=2020, mp=2017, mpa=0.25, plateau=2.6, rate=0.50),
    "7nm": dict(epa_base=2.15, anchor=2020, mp=2018, mpa=0.25, plateau=2.6, rate=0.55),
}

EFFICIENCY_END_YEAR = 2025

# quarterly defect densities: d(t) = floor + (start - floor) * exp(-k t)
DEFECTS = {
    "28nm": dict(start=0.40, floor=0.040, k=0.90),
    "16nm": dict(start=0.50, floor=0.050, k=0.85),
    "14nm": dict(start=0.545, floor=0.045, k=0.80),
    "7nm": dict(start=0.85, floor=0.082, k=0.75),
}

# 10nm is hand-tabulated so the first half year drops exactly 6%
DEFECTS_10NM = {
    2017: [1.15, 1.115, 1.081, 1.04],
    2018: [0.98, 0.90, 0.81, 0.72],
    2019: [0.63, 0.55, 0.48, 0.42],
    2020: [0.37, 0.33, 0.29, 0.26],
    2021: [0.24, 0.22, 0.205, 0.19],
    2022: [0.18, 0.17, 0.163, 0.156],
    2023: [0.15, 0.146, 0.142, 0.139],
    2024: [0.136, 0.134, 0.132, 0.131],
}

DEFECT_END_YEAR = 2024

# GWP-100 factors (AR5) and 95% relative uncertainties of emission-factor
# accounting; shares split each node's total CO2e-per-area across gases
GASES = [
    # gas, gwp, co2e share, rel_error_95, abatement
    ("NF3", 16100.0, 0.45, 0.40, 0.95),
    ("CF4", 6630.0, 0.25, 0.30, 0.90),
    ("C2F6", 11100.0, 0.15, 0.35, 0.90),
    ("SF6", 23500.0, 0.10, 3.00, 0.90),
    ("N2O", 265.0, 0.05, 0.60, 0.60),
]

GPA_TOTALS = {"28nm": 0.095, "16nm": 0.115, "14nm": 0.125, "10nm": 0.150, "7nm": 0.185}

CAPACITY = {
    "28nm": [("TW", 0.55), ("CN", 0.30), ("KR", 0.15)],
    "16nm": [("TW", 0.88), ("CN", 0.12)],
    "14nm": [("KR", 0.38), ("US", 0.34), ("TW", 0.28)],
    "10nm": [("KR", 0.31), ("TW", 0.69)],
    "7nm": [("TW", 0.82), ("KR", 0.18)],
}

# daily grid-intensity synthesis: level, seasonal amplitude, AR(1) noise sigma
CI_REGIONS = {
    "TW": dict(mean=561.0, seasonal=28.0, sigma=26.0),
    "KR": dict(mean=442.0, seasonal=22.0, sigma=22.0),
    "CN": dict(mean=582.0, seasonal=30.0, sigma=28.0),
    "US": dict(mean=388.0, seasonal=25.0, sigma=24.0),
    "IN": dict(mean=760.0, seasonal=20.0, sigma=26.0),
    "SE": dict(mean=27.0, seasonal=8.0, sigma=7.0),
}

CI_START = dt.date(2021, 1, 1)
CI_DAYS = 1095  # three years

# utilization samples: beta(a, b), sample count
UTILIZATION = {
    "gpu_production": (1.7, 3.2, 1500),  # heterogeneous fleet, mean ~0.35
    "cpu_datacenter": (2.6, 13.68, 1500),  # mean ~= 0.1597
    "mobile": (1.6, 24.0, 1500),
    "mobile_high": (3.2, 18.9, 1500),
}

PROVENANCE = {
    "nodes.csv": (
        "Raw energy-per-area characterization levels and materials terms approximated from "
        "public device-characterization studies (imec ICEP 2020/2023) and the ACT carbon "
        "model's published constants; anchor years chosen at the 2020 characterization.",
        True,
    ),
    "efficiency.csv": (
        "Cumulative process energy-efficiency improvement curves fitted to TSMC CSR "
        "disclosures; the 28nm series reproduces the reported 2.6x improvement three years "
        "into mass production, other nodes are shaped to the same disclosure family.",
        True,
    ),
    "defects.csv": (
        "Quarterly defect densities shaped to TSMC defect-density disclosures; the 10nm "
        "series reproduces the reported 6% drop over the first half year of mass production. "
        "Values between disclosed anchors are interpolated.",
        True,
    ),
    "gases.csv": (
        "GWP-100 factors transcribed from IPCC AR5; per-gas 95% relative uncertainties from "
        "IPCC 2006/2019 Tier 2 guidance (SF6 at 300%); post-abatement emission rates per cm2 "
        "approximated from imec gas-emission breakdowns.",
        True,
    ),
    "capacity.csv": (
        "2022 production-capacity splits by region; the 10nm South Korea 31% / Taiwan 69% "
        "split is transcribed from the cited capacity breakdown, other nodes approximated "
        "from industry capacity reports.",
        False,
    ),
    "ci/TW.csv": ("Synthetic daily series calibrated to Electricity Maps Taiwan 2021-2023 levels.", True),
    "ci/KR.csv": ("Synthetic daily series calibrated to Electricity Maps South Korea 2021-2023 levels.", True),
    "ci/CN.csv": ("Synthetic daily series calibrated to Electricity Maps China 2021-2023 levels.", True),
    "ci/US.csv": ("Synthetic daily series calibrated to Electricity Maps United States 2021-2023 levels.", True),
    "ci/IN.csv": ("Synthetic daily series calibrated to Electricity Maps India 2021-2023 levels.", True),
    "ci/SE.csv": ("Synthetic daily series calibrated to Electricity Maps Sweden 2021-2023 levels.", True),
    "utilization/gpu_production.csv": (
        "Synthetic sample shaped to production AI-accelerator utilization distributions "
        "reported for hyperscale fleets.",
        True,
    ),
    "utilization/cpu_datacenter.csv": (
        "Synthetic sample shaped to first-party cloud CPU utilization (mean ~16%).",
        True,
    ),
    "utilization/mobile.csv": (
        "Synthetic sample shaped to published smartphone SoC duty-cycle estimates.",
        True,
    ),
    "utilization/mobile_high.csv": (
        "Synthetic heavy-use variant of the smartphone utilization sample.",
        True,
    ),
}


def efficiency_multiplier(plateau: float, rate: float, years_in: int) -> float:
    return plateau - (plateau - 1.0) * math.exp(-rate * years_in)


def quarterly_dates(year: int):
    return [dt.date(year, m, 1) for m in (1, 4, 7, 10)]


def build_nodes():
    lines = ["name,epa_base_kwh_cm2,epa_anchor_year,mass_production_year,mpa_kgco2_cm2"]
    for name, spec in NODES.items():
        lines.append(f"{name},{spec['epa_base']},{spec['anchor']},{spec['mp']},{spec['mpa']}")
    return "\n".join(lines) + "\n"


def build_efficiency():
    lines = ["node,year,multiplier"]
    for name, spec in NODES.items():
        for year in range(spec["mp"], EFFICIENCY_END_YEAR + 1):
            mult = efficiency_multiplier(spec["plateau"], spec["rate"], year - spec["mp"])
            lines.append(f"{name},{year},{round(mult, 4)}")
    return "\n".join(lines) + "\n"


def build_defects():
    lines = ["node,date,d0_per_cm2"]
    for name, spec in NODES.items():
        if name == "10nm":
            for year in sorted(DEFECTS_10NM):
                for date, value in zip(quarterly_dates(year), DEFECTS_10NM[year]):
                    lines.append(f"{name},{date.isoformat()},{value}")
            continue
        curve = DEFECTS[name]
        for year in range(spec["mp"], DEFECT_END_YEAR + 1):
            for q, date in enumerate(quarterly_dates(year)):
                t = (year - spec["mp"]) + q * 0.25
                d0 = curve["floor"] + (curve["start"] - curve["floor"]) * math.exp(-curve["k"] * t)
                lines.append(f"{name},{date.isoformat()},{round(d0, 5)}")
    return "\n".join(lines) + "\n"


def build_gases():
    lines = ["node,gas,gwp,kg_per_cm2,rel_error_95,abatement"]
    for name in NODES:
        total = GPA_TOTALS[name]
        for gas, gwp, share, rel, abatement in GASES:
            kg = share * total / gwp
            lines.append(f"{name},{gas},{gwp},{kg:.6e},{rel},{abatement}")
    return "\n".join(lines) + "\n"


def build_capacity():
    lines = ["node,region,share"]
    for name, shares in CAPACITY.items():
        for region, share in shares:
            lines.append(f"{name},{region},{share}")
    return "\n".join(lines) + "\n"


def build_ci(region: str, spec: dict, rng: np.random.Generator) -> str:
    noise = np.empty(CI_DAYS)
    state = 0.0
    innovations = rng.normal(0.0, spec["sigma"], CI_DAYS)
    for i in range(CI_DAYS):
        state = 0.8 * state + innovations[i]
        noise[i] = state
    lines = ["timestamp,g_per_kwh"]
    for i in range(CI_DAYS):
        day = CI_START + dt.timedelta(days=i)
        doy = day.timetuple().tm_yday
        seasonal = spec["seasonal"] * math.sin(2.0 * math.pi * (doy - 20) / 365.25)
        value = max(spec["mean"] + seasonal + noise[i], 1.0)
        lines.append(f"{day.isoformat()}T00:00:00,{value:.2f}")
    return "\n".join(lines) + "\n"


def build_utilization(a: float, b: float, count: int, rng: np.random.Generator) -> str:
    values = rng.beta(a, b, count)
    lines = ["value"] + [f"{v:.6f}" for v in values]
    return "\n".join(lines) + "\n"


def build_provenance() -> str:
    lines = []
    for rel, (source, synthetic) in PROVENANCE.items():
        lines.append(f'[files."{rel}"]')
        lines.append(f'source = "{source}"')
        lines.append(f"synthetic = {'true' if synthetic else 'false'}")
        lines.append("")
    return "\n".join(lines)


def main() -> None:
    rng = np.random.default_rng(RNG_SEED)
    ROOT.mkdir(parents=True, exist_ok=True)
    (ROOT / "ci").mkdir(exist_ok=True)
    (ROOT / "utilization").mkdir(exist_ok=True)

    (ROOT / "manifest.toml").write_text('version = "1.0.0"\nname = "public-fab-bundle"\n')
    (ROOT / "nodes.csv").write_text(build_nodes())
    (ROOT / "efficiency.csv").write_text(build_efficiency())
    (ROOT / "defects.csv").write_text(build_defects())
    (ROOT / "gases.csv").write_text(build_gases())
    (ROOT / "capacity.csv").write_text(build_capacity())
    for region, spec in CI_REGIONS.items():
        (ROOT / "ci" / f"{region}.csv").write_text(build_ci(region, spec, rng))
    for name, (a, b, count) in UTILIZATION.items():
        (ROOT / "utilization" / f"{name}.csv").write_text(build_utilization(a, b, count, rng))
    (ROOT / "provenance.toml").write_text(build_provenance())
    print(f"wrote bundle to {ROOT}")


if __name__ == "__main__":
    main()
