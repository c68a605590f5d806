"""Geometry of closed plane curves under length-weighted conformal metrics."""

from .bounds import (
    BoundsReport,
    BumpError,
    BumpSpec,
    GridSpec,
    bump_bound,
    bump_path,
    d_flat,
    first_variation_check,
    linear_path_check,
    solve_bump,
    support_measure,
    swept_area,
    theorem1_bounds,
)
from .curvature import (
    TangentPlane,
    boundedness,
    christoffel,
    curvature_blowup_probe,
    orthonormalize,
    sectional_curvature,
)
from .curve import (
    DiscreteCurve,
    ImmersionError,
    PointOnCurveError,
    geometry,
    make_circle,
    make_curve,
    make_ellipse,
    make_figure_eight,
    make_rounded_square,
    resample_arclength,
    sup_distance,
    winding_number,
)
from .geodesic import (
    BreakdownError,
    ShootResult,
    circle_geodesic_exact,
    geodesic_residual,
    geodesic_rhs,
    geodesic_shoot,
    grassfire,
)
from .kernels import BACKEND
from .metric import (
    ConformalFactor,
    CurvePath,
    inner,
    normal_velocity,
    path_energy,
    path_length,
)

__version__ = "0.1.0"
