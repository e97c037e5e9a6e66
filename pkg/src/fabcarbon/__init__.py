"""fabcarbon: probabilistic embodied-carbon modeling for semiconductor designs.

Sparse public fab data (yearly energy intensities, defect densities, process
gas inventories, regional grid-intensity histories) becomes full probability
distributions of carbon footprints, which then drive risk-aware provisioning,
chiplet-versus-monolithic comparison, and uncertainty-source diagnosis.
"""

__version__ = "0.1.0"

from .carbon import (
    ALPHA_BAND_EMBODIED_DOMINATED,
    ALPHA_BAND_OPERATIONAL_DOMINATED,
    CarbonResult,
    ChipletSpec,
    DesignSpec,
    DiagnosisReport,
    MonteCarlo,
    OperationalProfile,
    cpa_distribution,
    deterministic_cpa_point,
    diagnose_sources,
    embodied_distribution,
    operational_distribution,
    total_and_alpha,
)
from .grid import DEFAULT_GRID_POINTS, GridDistribution, GridSpec, PointMass, grid_from_samples
from .ingest import DatasetBundle, load_bundle, save_bundle
from .kde import KdeInput, default_grid, kde_fit
from .params import (
    GasEmission,
    RegionCIHistory,
    TechNode,
    build_ci_distribution,
    build_defect_distribution,
    build_epa_distribution,
    build_gpa_components,
    build_gpa_distribution,
    build_utilization_distribution,
    build_yield_distribution,
    poisson_yield,
)
from .propagate import (
    Const,
    Div,
    ExpNegMul,
    Input,
    Mul,
    PropagationExpr,
    Scale,
    auto_out_grid,
    propagate_grid,
    propagate_mc,
)
from .provision import Candidate, ProvisionPolicy, ProvisionReport, provision, scale_accelerator_area
from .sampling import SampleSet, sample
from .summary import CarbonSummary, summarize

__all__ = [
    "ALPHA_BAND_EMBODIED_DOMINATED",
    "ALPHA_BAND_OPERATIONAL_DOMINATED",
    "Candidate",
    "CarbonResult",
    "CarbonSummary",
    "ChipletSpec",
    "Const",
    "DatasetBundle",
    "DEFAULT_GRID_POINTS",
    "DesignSpec",
    "DiagnosisReport",
    "Div",
    "ExpNegMul",
    "GasEmission",
    "GridDistribution",
    "GridSpec",
    "Input",
    "KdeInput",
    "MonteCarlo",
    "Mul",
    "OperationalProfile",
    "PointMass",
    "PropagationExpr",
    "ProvisionPolicy",
    "ProvisionReport",
    "RegionCIHistory",
    "SampleSet",
    "Scale",
    "TechNode",
    "auto_out_grid",
    "build_ci_distribution",
    "build_defect_distribution",
    "build_epa_distribution",
    "build_gpa_components",
    "build_gpa_distribution",
    "build_utilization_distribution",
    "build_yield_distribution",
    "cpa_distribution",
    "default_grid",
    "deterministic_cpa_point",
    "diagnose_sources",
    "embodied_distribution",
    "grid_from_samples",
    "kde_fit",
    "load_bundle",
    "operational_distribution",
    "poisson_yield",
    "propagate_grid",
    "propagate_mc",
    "provision",
    "sample",
    "save_bundle",
    "scale_accelerator_area",
    "summarize",
    "total_and_alpha",
]
