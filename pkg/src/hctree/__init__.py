"""Boundary laws and Gibbs measures of the countable-spin hard-core model on the Cayley tree."""
from .activity import (
    FiniteSupport,
    ModelParams,
    TwoSidedGeometric,
    critical_activity,
    parse_activity,
    squared_activity_sum,
    total_activity,
)
from .bgfield import BGParams, bg_field, bg_root_value, scan_t
from .dynamics import FixedPointData, classify_orbit, cycle_scan, fixed_point_data
from .pathcodes import PathCode

__version__ = "0.1.0"

__all__ = [
    "BGParams",
    "FiniteSupport",
    "FixedPointData",
    "ModelParams",
    "PathCode",
    "TwoSidedGeometric",
    "bg_field",
    "bg_root_value",
    "classify_orbit",
    "critical_activity",
    "cycle_scan",
    "fixed_point_data",
    "parse_activity",
    "scan_t",
    "squared_activity_sum",
    "total_activity",
]
