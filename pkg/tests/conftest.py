from pathlib import Path

import numpy as np
import pytest

from fabcarbon import GridDistribution


def normal_grid(mu: float, sigma: float, n_points: int = 4096, span: float = 8.0) -> GridDistribution:
    """Analytic normal rendered on a grid; the workhorse test input."""
    lo, hi = mu - span * sigma, mu + span * sigma
    x = np.linspace(lo, hi, n_points)
    density = np.exp(-0.5 * ((x - mu) / sigma) ** 2) / (sigma * np.sqrt(2.0 * np.pi))
    return GridDistribution.from_unnormalized(lo, hi, density)


def write_test_bundle(root: Path, **patches: str) -> Path:
    """Write a small, fully valid bundle; ``patches`` replace file contents."""
    files = {
        "manifest.toml": 'version = "test-1"\nname = "tiny"\n',
        "nodes.csv": (
            "name,epa_base_kwh_cm2,epa_anchor_year,mass_production_year,mpa_kgco2_cm2\n"
            "10nm,1.8,2020,2017,0.1\n"
            "16nm,1.3,2020,2015,0.1\n"
        ),
        "efficiency.csv": (
            "node,year,multiplier\n"
            "10nm,2017,1.0\n10nm,2018,1.8\n10nm,2019,2.3\n10nm,2020,2.6\n"
            "16nm,2015,1.0\n16nm,2016,1.8\n16nm,2017,2.3\n16nm,2018,2.6\n16nm,2019,2.7\n16nm,2020,2.75\n"
        ),
        "defects.csv": (
            "node,date,d0_per_cm2\n"
            "10nm,2017-03-01,0.55\n10nm,2017-09-01,0.517\n10nm,2018-03-01,0.45\n10nm,2019-03-01,0.33\n"
            "16nm,2015-06-01,0.5\n16nm,2016-06-01,0.3\n16nm,2018-06-01,0.18\n16nm,2020-06-01,0.12\n"
        ),
        "gases.csv": (
            "node,gas,gwp,kg_per_cm2,rel_error_95,abatement\n"
            "10nm,SF6,23500.0,2e-06,3.0,0.9\n"
            "10nm,NF3,16100.0,4e-06,0.3,0.95\n"
            "16nm,SF6,23500.0,1.5e-06,3.0,0.9\n"
            "16nm,NF3,16100.0,3e-06,0.3,0.95\n"
        ),
        "capacity.csv": (
            "node,region,share\n"
            "10nm,KR,0.31\n10nm,TW,0.69\n"
            "16nm,TW,1.0\n"
        ),
        "ci/TW.csv": "timestamp,g_per_kwh\n"
        + "".join(f"2021-01-{d:02d}T00:00:00,{540 + 7 * (d % 5)}\n" for d in range(1, 29)),
        "ci/KR.csv": "timestamp,g_per_kwh\n"
        + "".join(f"2021-01-{d:02d}T00:00:00,{420 + 9 * (d % 4)}\n" for d in range(1, 29)),
        "utilization/dc.csv": "value\n" + "".join(f"0.{10 + d}\n" for d in range(1, 60)),
        "provenance.toml": "\n".join(
            f'[files."{rel}"]\nsource = "unit-test fixture"\nsynthetic = true\n'
            for rel in (
                "nodes.csv", "efficiency.csv", "defects.csv", "gases.csv",
                "capacity.csv", "ci/TW.csv", "ci/KR.csv", "utilization/dc.csv",
            )
        ),
    }
    files.update(patches)
    for rel, content in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content)
    return root


@pytest.fixture
def std_normal():
    return normal_grid(0.0, 1.0)


@pytest.fixture
def uniform_01():
    x = np.linspace(0.0, 1.0, 4096)
    return GridDistribution.from_unnormalized(0.0, 1.0, np.ones_like(x))
