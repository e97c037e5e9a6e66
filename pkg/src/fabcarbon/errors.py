"""Exception hierarchy for fabcarbon.

Every contract violation raises a semantic subclass of :class:`FabCarbonError`
rather than a bare ``ValueError``, so callers can distinguish bad inputs
(validation), bad data files (ingestion), and numeric infeasibility.
"""


class FabCarbonError(Exception):
    """Base class for all fabcarbon errors."""


class ValidationError(FabCarbonError, ValueError):
    """An input violates a documented contract."""


# --- distribution / KDE ------------------------------------------------------

class EmptyInputError(ValidationError):
    """No data points were supplied."""


class ZeroWeightSumError(ValidationError):
    """Kernel weights sum to zero."""


class GridTooNarrowError(ValidationError):
    """Evaluation grid does not cover the kernel support (reports the span needed)."""


class NonPositiveBandwidthError(ValidationError):
    """Explicit KDE bandwidth must be strictly positive."""


class QuantileOutOfRangeError(ValidationError):
    """Requested quantile lies outside [0, 1]."""


# --- propagation -------------------------------------------------------------

class UnboundInputError(ValidationError):
    """An expression references a name with no bound input source."""


class DivisionSupportIncludesZeroError(ValidationError):
    """A divide node's denominator support is not strictly positive (raised at validation)."""


class DivisorSupportNonPositiveError(ValidationError):
    """Grid division requires the divisor's support to be strictly positive."""


class OutGridTooNarrowError(ValidationError):
    """Output grid does not cover the combined support (reports the span needed)."""


# --- parameter builders ------------------------------------------------------

class YearBeforeMassProductionError(ValidationError):
    """Requested vintage predates the node's mass-production year."""


class EmptyEfficiencySeriesError(ValidationError):
    """Node has no fab-efficiency records."""


class EmptyGasInventoryError(ValidationError):
    """Node has no process-gas records."""


class EmptyDefectWindowError(ValidationError):
    """No defect-density records fall inside the requested date window."""


class NonPositiveAreaError(ValidationError):
    """Die area must be strictly positive."""


class MismatchedLengthsError(ValidationError):
    """Parallel lists have different lengths."""


class SharesDontSumToOneError(ValidationError):
    """Capacity or mixture shares do not sum to one."""


class SampleOutOfUnitIntervalError(ValidationError):
    """Utilization samples must lie in [0, 1]."""


# --- carbon composition ------------------------------------------------------

class YieldSupportAtZeroError(ValidationError):
    """Yield distribution support touches zero; carbon per good die would diverge."""


class LengthMismatchError(ValidationError):
    """Sample sets must have equal length to be combined elementwise."""


class ZeroTotalSampleError(ValidationError):
    """Embodied and operational samples both admit zero; ratio undefined."""


# --- provisioning ------------------------------------------------------------

class NonPositiveSideError(ValidationError):
    """Systolic-array side length must be a positive integer."""


class NoFeasibleCandidateError(FabCarbonError):
    """No candidate satisfies the risk constraint (the report is still produced)."""


# --- dataset ingestion -------------------------------------------------------

class IngestError(FabCarbonError):
    """Base class for dataset-bundle problems."""

    def __init__(self, message: str, *, file: str = "", line: int = 0, column: str = ""):
        loc = file
        if line:
            loc += f":{line}"
        if column:
            loc += f" ({column})"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.file = file
        self.line = line
        self.column = column


class SchemaViolationError(IngestError):
    """A data file row does not match its schema."""


class UnitOutOfRangeError(IngestError):
    """A value is outside its physically meaningful range."""


class MissingProvenanceError(IngestError):
    """A data file has no provenance entry."""


class DuplicateNodeError(IngestError):
    """The same technology node is defined twice."""


class UnknownNodeError(FabCarbonError):
    """A scenario references a node that is not in the bundle."""


# --- scenarios ---------------------------------------------------------------

class ScenarioError(FabCarbonError):
    """A scenario file cannot be parsed or fails validation."""
