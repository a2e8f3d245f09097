"""symmcal: a numerical laboratory for symmetric decreasing rearrangement.

Computes rearrangements of sets and functions on Euclidean grids and on
weighted radial product manifolds, and verifies the associated
rearrangement, isoperimetric, co-area and PDE-comparison inequalities with
slack-quantified reports.
"""

from .checks import CheckResult
from .grid import (
    DistributionTable,
    Grid,
    GridMismatchError,
    RegionMask,
    ScalarField,
    cell_centers,
    convolve,
    gradient_magnitude,
    random_smooth_field,
    unit_ball_volume,
    volume,
)
from .rearrange import (
    RadialOrder,
    distribution_function,
    layer_cake_eval,
    level_set_commutes,
    radial_order,
    rearrange_field,
    rearrange_mask,
    rearranged_char_equals_char_of_rearranged,
    superlevel_mask,
)
from .report import SuiteConfig, VerificationReport, emit_csv
from .suites import run_suite

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "DistributionTable",
    "Grid",
    "GridMismatchError",
    "RadialOrder",
    "RegionMask",
    "ScalarField",
    "SuiteConfig",
    "VerificationReport",
    "cell_centers",
    "convolve",
    "distribution_function",
    "emit_csv",
    "gradient_magnitude",
    "layer_cake_eval",
    "level_set_commutes",
    "radial_order",
    "random_smooth_field",
    "rearrange_field",
    "rearrange_mask",
    "rearranged_char_equals_char_of_rearranged",
    "run_suite",
    "superlevel_mask",
    "unit_ball_volume",
    "volume",
    "__version__",
]
