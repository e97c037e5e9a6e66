"""Risk-aware accelerator provisioning under a carbon budget.

Four systolic-array sizes scale down from a 3.31 cm2 baseline (compute array
quadratically, buffers linearly).  Three selection rules disagree:

* mean estimate  -- picks the biggest design and quietly runs a >20% chance
                    of blowing the budget;
* worst case     -- picks by an extreme quantile, sacrificing performance;
* chance rule    -- picks the fastest design whose exceedance probability
                    stays within the risk tolerance.
"""

from pathlib import Path

from fabcarbon import (
    Candidate,
    ChipletSpec,
    DesignSpec,
    MonteCarlo,
    ProvisionPolicy,
    load_bundle,
    provision,
    scale_accelerator_area,
)

DATA = Path(__file__).resolve().parent.parent / "data"

bundle = load_bundle(DATA)
node = bundle.node("28nm")

BASE_SIDE = 256
BASE_SYSTOLIC = 0.795  # cm2, scales with side^2
BASE_BUFFER = 2.515  # cm2, scales with side
PERFORMANCE = {32: 0.41, 64: 0.48, 128: 0.55, 256: 1.0}

candidates = []
for side, perf in PERFORMANCE.items():
    area = scale_accelerator_area(side, BASE_SIDE, BASE_SYSTOLIC, BASE_BUFFER)
    design = DesignSpec(f"{side}x{side}", (ChipletSpec(node, area, 1),), as_of_year=2015)
    candidates.append(Candidate(design=design, performance=perf, label=f"{side}x{side}"))
    print(f"{side:>3}x{side:<3} area {area:5.2f} cm2  performance {perf:.2f}")

policy = ProvisionPolicy(budget_kgco2=5.5, risk=0.05)
report = provision(candidates, policy, bundle.ci_histories, MonteCarlo(n=200_000, seed=99))

print(f"\nbudget {policy.budget_kgco2} kg CO2e, risk tolerance {policy.risk:.0%}")
print(f"{'label':>8} {'mean':>6} {'p95':>6} {'p_exceed':>9} {'feasible':>9}")
for c in report.candidates:
    print(
        f"{c.label:>8} {c.summary.mean:6.2f} {c.summary.percentiles[0.95]:6.2f} "
        f"{c.p_exceed:9.3f} {str(c.feasible):>9}"
    )

cmp = report.comparison
print(f"\nchance-constrained pick : {report.selected}")
print(f"mean-estimate pick      : {report.mean_selection} "
      f"(true exceedance risk {cmp['mean_selection_p_exceed']:.1%})")
print(f"worst-case pick (q={report.worst_case_quantile}): {report.worst_case_selection}")
if cmp["risk_aware_vs_worst_case_performance_gain"] is not None:
    print(f"performance vs worst-case pick: "
          f"{cmp['risk_aware_vs_worst_case_performance_gain']:+.1%}")
