#!/usr/bin/env python3
"""Report every dataset-conditional acceptance statistic for the bundle.

Run after editing tools/build_bundle.py to see where each number lands
relative to its acceptance window.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fabcarbon import (
    ChipletSpec,
    DesignSpec,
    MonteCarlo,
    OperationalProfile,
    build_ci_distribution,
    build_utilization_distribution,
    cpa_distribution,
    diagnose_sources,
    embodied_distribution,
    load_bundle,
    operational_distribution,
    total_and_alpha,
)
from fabcarbon.rng import derive_seed

N = 400_000
SEED = 20240810
ROOT = Path(__file__).resolve().parent.parent / "data"


def mc(name: str, n: int = N) -> MonteCarlo:
    return MonteCarlo(n=n, seed=derive_seed(SEED, name))


def skew(values: np.ndarray) -> float:
    c = values - values.mean()
    return float(np.mean(c**3) / np.mean(c**2) ** 1.5)


def main() -> None:
    t0 = time.time()
    bundle = load_bundle(ROOT)
    hist = bundle.ci_histories

    print("== criterion 6: per-cm2 maturity view (as_of 2023, area 1 cm2) ==")
    stats = {}
    for name in ("28nm", "16nm", "10nm", "7nm"):
        result = cpa_distribution(bundle.node(name), hist, mc(f"cpa:{name}"), as_of_year=2023)
        s = result.summary
        stats[name] = s
        print(
            f"  {name:>5}: mean {s.mean:6.3f}  std {s.std:6.3f}  p95 {s.percentiles[0.95]:6.3f}"
            f"  p95/mean {s.percentiles[0.95] / s.mean:5.3f}"
        )
    means = [stats[n].mean for n in ("28nm", "16nm", "10nm", "7nm")]
    stds = [stats[n].std for n in ("28nm", "16nm", "10nm", "7nm")]
    print(f"  means monotone: {all(b > a for a, b in zip(means, means[1:]))}")
    print(f"  stds  monotone: {all(b > a for a, b in zip(stds, stds[1:]))}")
    r = stats["7nm"].percentiles[0.95] / stats["7nm"].mean
    print(f"  7nm p95/mean {r:.3f} in [1.4, 1.8]: {1.4 <= r <= 1.8}")

    print("== criterion 7: server + mobile chiplet studies ==")
    node14 = bundle.node("14nm")
    mono = DesignSpec("server_mono", (ChipletSpec(node14, 7.77, 1),), 2019)
    chip = DesignSpec("server_chiplet", (ChipletSpec(node14, 2.13, 4),), 2019)
    rm = embodied_distribution(mono, hist, mc("server_mono"))
    rc = embodied_distribution(chip, hist, mc("server_chip"))
    ratio = rc.summary.percentiles[0.95] / rm.summary.percentiles[0.95]
    print(f"  mono: mean {rm.summary.mean:.2f} p95 {rm.summary.percentiles[0.95]:.2f} skew {skew(rm.samples.values):.2f}")
    print(f"  chip: mean {rc.summary.mean:.2f} p95 {rc.summary.percentiles[0.95]:.2f} skew {skew(rc.samples.values):.2f}")
    print(f"  p95 ratio {ratio:.3f} in [0.45, 0.75]: {0.45 <= ratio <= 0.75}")

    node10 = bundle.node("10nm")
    m_mono = DesignSpec("mobile_mono", (ChipletSpec(node10, 0.20, 1),), 2018)
    m_chip = DesignSpec("mobile_chiplet", (ChipletSpec(node10, 0.10, 2),), 2018)
    rmm = embodied_distribution(m_mono, hist, mc("mob_mono"))
    rmc = embodied_distribution(m_chip, hist, mc("mob_chip"))
    red = 1.0 - rmc.summary.percentiles[0.95] / rmm.summary.percentiles[0.95]
    print(f"  mobile mono p95 {rmm.summary.percentiles[0.95]:.3f} (mean {rmm.summary.mean:.3f})")
    print(f"  mobile chip p95 {rmc.summary.percentiles[0.95]:.3f} (mean {rmc.summary.mean:.3f})")
    print(f"  mobile p95 reduction {red * 100:.1f}% in [5, 15]: {0.05 <= red <= 0.15}")

    print("== criterion 8: node mixing (16nm CPU + 10nm accel vs all-10nm) ==")
    node16 = bundle.node("16nm")
    area_scale = 1.55
    mixed = DesignSpec(
        "mobile_mixed",
        (ChipletSpec(node16, 0.10 * area_scale, 1), ChipletSpec(node10, 0.10, 1)),
        2018,
    )
    rx = embodied_distribution(mixed, hist, mc("mob_mixed"))
    red_chip = 1.0 - rx.summary.percentiles[0.95] / rmc.summary.percentiles[0.95]
    red_mono = 1.0 - rx.summary.percentiles[0.95] / rmm.summary.percentiles[0.95]
    print(f"  mixed p95 {rx.summary.percentiles[0.95]:.3f} (mean {rx.summary.mean:.3f})")
    print(f"  vs chiplet {red_chip * 100:.1f}% in [4, 12]: {0.04 <= red_chip <= 0.12}")
    print(f"  vs mono    {red_mono * 100:.1f}% in [12, 25]: {0.12 <= red_mono <= 0.25}")

    print("== criterion 9: diagnosis ranking on the server design ==")
    report = diagnose_sources(chip, hist, mc("diag", n=200_000))
    for source in report.ranking:
        print(f"  {source:>6}: var {report.summaries[source].variance:9.4f}")
    print(f"  full model var {report.full_summary.variance:9.4f}")
    ok = report.ranking[0] == "EPA" and report.ranking[-1] == "GPA"
    print(f"  EPA highest and GPA lowest: {ok}")

    print("== criterion 11: alpha regimes ==")
    def profile(tdp, years, util, region):
        return OperationalProfile(
            tdp_watts=tdp,
            lifetime_years=years,
            utilization=build_utilization_distribution(bundle.utilization_sets[util]),
            ci_use=build_ci_distribution([hist[region]], [1.0]),
        )

    node28 = bundle.node("28nm")
    accel = DesignSpec("accelerator", (ChipletSpec(node28, 3.31, 1),), 2015)
    mobile_soc = DesignSpec("mobile_soc", (ChipletSpec(bundle.node("7nm"), 1.08, 1),), 2021)

    cases = {
        "accelerator_us": (accel, profile(75.0, 5.0, "gpu_production", "US")),
        "server_us": (chip, profile(280.0, 5.0, "cpu_datacenter", "US")),
        "mobile_highci": (mobile_soc, profile(6.0, 2.59, "mobile_high", "IN")),
        "mobile_greenci": (mobile_soc, profile(6.0, 2.59, "mobile", "SE")),
        "mobile_us": (mobile_soc, profile(6.0, 2.59, "mobile", "US")),
    }
    for name, (design, prof) in cases.items():
        emb = embodied_distribution(design, hist, mc(f"emb:{name}", n=200_000))
        op = operational_distribution(prof, mc(f"op:{name}", n=200_000))
        _, alpha = total_and_alpha(emb.samples, op.samples)
        print(
            f"  {name:>14}: emb p95 {emb.summary.percentiles[0.95]:8.2f}  "
            f"op p95 {op.summary.percentiles[0.95]:8.2f}  alpha p95 {alpha.summary.percentiles[0.95]:6.3f}"
        )

    print(f"(total {time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
