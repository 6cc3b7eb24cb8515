"""Rule kernels on infinite node sets and their numerical Martin boundary."""
from .lab import (
    BelowSpectralRadius,
    BoundaryEstimate,
    EigenCheckFailed,
    EigenvectorEstimate,
    GeodesicReport,
    InconsistentProbes,
    NotAPath,
    NotConverged,
    NotMetric,
    RieffelReport,
    TruncationArtifact,
    almost_geodesic_check,
    column_limit,
    construct_eigenvector,
    eigen_residuals,
    h_flat_self,
    inner_window,
    rieffel_check,
)
from .rules import (
    FIXTURE_RULES,
    ChainRule,
    FileRule,
    HedgehogRule,
    KernelRule,
    NonTightRule,
    ShiftedRule,
    TriangleRule,
    TripodRule,
    Z2Rule,
    ZRule,
    get_rule,
)
from .truncate import BallTooLarge, BallTruncation, star_rows, truncate
