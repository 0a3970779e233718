"""Hausdorff-metric geometry on spaces of compact (convex) sets.

Model spaces, midpoint maps, midpoint-convex hulls, midpoint operators on
set space, and induced isometries, with numerical checks for each.
"""

from .hull import (
    EmptyIntersectionError,
    HullNonConvergenceError,
    HullParams,
    default_candidates,
    m_convex_hull,
    midpoint_set_filtered,
    midpoint_set_frak,
    midpoint_set_M,
)
from .isometry import (
    IsometryDesc,
    IsometryError,
    NotPointImageError,
    RecoveryFailedError,
    apply_isometry,
    induced_map,
    recover_point_map,
    verify_ball_fixing,
    verify_induced_isometry,
    verify_sphere_subset_fixing,
)
from .midpoint import (
    CANONICAL,
    Canonical,
    Combined,
    Conjugated,
    check_cat0_comparison,
    check_midpoint_axioms,
    combine_midpoint_maps,
    midpoint,
)
from .report import CheckReport
from .sets import (
    Cloud,
    ball_net,
    diameter,
    dist_to_set,
    hausdorff_distance,
    sphere_net,
    tubular_contains,
)
from .spaces import (
    DegenerateGeodesicError,
    Euclidean,
    GeometryError,
    Hyperbolic,
    NormedLp,
    Space,
    make_space,
)

__version__ = "0.1.0"
