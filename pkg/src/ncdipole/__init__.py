"""Nonconservative van der Waals forces between an excited and a ground-state atom."""
from .core import (
    CONSTANTS,
    Atom,
    Constants,
    DimensionlessGroups,
    InvalidInputError,
    PerturbativeRegimeWarning,
    TwoAtomSystem,
    decompose_dipole,
    detuned,
    dimensionless,
    force_scale,
    hydrogen_atom,
    hydrogen_dipole,
    hydrogen_preset,
    with_separation,
)
from .forces import (
    ForceSample,
    Tier,
    WrongTierError,
    force_closed_A,
    force_closed_B,
    force_full_dissimilar,
    force_full_identical,
    force_leading_identical,
    force_sample,
    full_dissimilar_terms,
    full_identical_terms,
    net_force,
    reciprocal_split,
)
from .green import (
    SingularityError,
    cross_projected_curl,
    curl_electric_green,
    electric_green,
    electric_green_imag_axis,
    magnetic_green,
)
from .kinematics import (
    Convention,
    DisplacementCurve,
    RootNotFoundError,
    displacement,
    displacement_coefficients,
    hydrogen_displacement_curve,
    longitudinal_momentum,
    same_direction_threshold,
    shape_A,
    shape_B,
)
from .quadrature import NonConvergenceError, QuadratureResult, adaptive_integrate, offresonant_integral

__version__ = "0.1.0"
