"""Finite-truncation numerics for traces of model spaces K_B of interpolating
Blaschke products: the tilde transform, interpolation in K_B, boundary
quadrature, and the radial counterexample scans."""

__version__ = "0.1.0"

from .blaschke import (
    BlaschkeProduct,
    SeparationReport,
    ZeroSequence,
    blaschke_eval,
    carleson_constant,
    derivative_at_zero,
    separation_report,
)
from .disk import DiskPoint, blaschke_factor, pseudo_hyperbolic
from .modelspace import (
    ModelSpaceElement,
    gram_h2_norm,
    interpolate_in_KB,
    lagrange_eval,
    residue_identity_check,
    tilde_trace_via_cauchy,
    vinogradov_interpolant,
)
from .quadrature import GradedGrid, QuadratureGrid, hardy_norm
from .sequences import counterexample_values, m_space_norm, weighted_lp_norm
from .tilde import tilde_apply, tilde_matrices, weighted_operator_bounds
