"""Chiplets versus monolithic dies, and mixing mature with advanced nodes.

Two studies on the bundled dataset:

* a server CPU as one 777 mm2 die versus four 213 mm2 chiplets on the same
  node -- splitting shrinks the yield divisor's long tail, so the p95
  estimate falls much further than the mean;
* a 20 mm2 mobile SoC split into CPU + accelerator chiplets, then with the
  CPU chiplet ported to a mature node (with an area-scaling penalty), which
  trades a little mean for a visibly tighter distribution.

Chiplets on the same node share each trial's fab conditions; only the yield
term differs with die area.
"""

from pathlib import Path

import numpy as np

from fabcarbon import ChipletSpec, DesignSpec, MonteCarlo, embodied_distribution, load_bundle
from fabcarbon.rng import derive_seed

DATA = Path(__file__).resolve().parent.parent / "data"
N = 200_000

bundle = load_bundle(DATA)
hist = bundle.ci_histories


def run(design):
    mc = MonteCarlo(n=N, seed=derive_seed(4, design.name))
    return embodied_distribution(design, hist, mc)


def skew(values):
    c = values - values.mean()
    return float(np.mean(c**3) / np.mean(c**2) ** 1.5)


def show(label, result):
    s = result.summary
    print(f"  {label:<22} mean {s.mean:7.2f}  p95 {s.percentiles[0.95]:7.2f}  "
          f"std {s.std:6.2f}  skew {skew(result.samples.values):5.2f}")


print("server CPU on 14nm (2019 vintage), kg CO2e per package")
node14 = bundle.node("14nm")
mono = run(DesignSpec("monolithic_777mm2", (ChipletSpec(node14, 7.77, 1),), 2019))
chip = run(DesignSpec("four_213mm2_chiplets", (ChipletSpec(node14, 2.13, 4),), 2019))
show("monolithic 777 mm2", mono)
show("4 x 213 mm2 chiplets", chip)
ratio = chip.summary.percentiles[0.95] / mono.summary.percentiles[0.95]
print(f"  chiplet p95 is {1 - ratio:.0%} below monolithic; the monolithic skew shows "
      "the yield long tail")

print("\nmobile SoC on 10nm (2018 vintage, one year into production)")
node10, node16 = bundle.node("10nm"), bundle.node("16nm")
m_mono = run(DesignSpec("mobile_mono", (ChipletSpec(node10, 0.20, 1),), 2018))
m_chip = run(DesignSpec("mobile_chiplet", (ChipletSpec(node10, 0.10, 2),), 2018))
# porting the CPU chiplet to 16nm costs a 1.55x area scale (scenario input)
m_mixed = run(
    DesignSpec(
        "mobile_mixed",
        (ChipletSpec(node16, 0.10 * 1.55, 1), ChipletSpec(node10, 0.10, 1)),
        2018,
    )
)
show("monolithic 20 mm2", m_mono)
show("2 x 10 mm2 chiplets", m_chip)
show("16nm CPU + 10nm accel", m_mixed)
print(f"  chiplet p95 {1 - m_chip.summary.percentiles[0.95] / m_mono.summary.percentiles[0.95]:.0%} "
      f"below monolithic; mixed-node p95 another "
      f"{1 - m_mixed.summary.percentiles[0.95] / m_chip.summary.percentiles[0.95]:.0%} below the chiplets")
