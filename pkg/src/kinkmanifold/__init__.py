"""Kink manifold of a three-component scalar field model.

Regime classification, vacua, the first-order (Bogomol'nyi) flow in
elliptic coordinates, orbit invariants, energies and sum rules.
"""

from .bps_solver import IntegrationOptions, KinkTrajectory, integrate_kink, trace_orbit
from .energy_analysis import (
    FAMILIES,
    FamilyLabel,
    check_sum_rules,
    classify_stability,
    count_lumps,
    energy_profile,
    euler_lagrange_residual,
    family_energy_closed_form,
    family_member,
    trajectory_energy_numeric,
)
from .errors import KinkError, NumericalError, ValidationError
from .model_core import (
    CartesianPoint,
    EllipticPoint,
    ModelParams,
    Regime,
    SignChoice,
    cartesian_to_elliptic,
    classify_regime,
    elliptic_to_cartesian,
    potential_cartesian,
    potential_elliptic,
)
from .orbit_quadratures import OrbitConstants, orbit_constants_from_point, piece_invariant_drift
from .superpotential import SignSector, superpotential_value, verify_w_pde
from .vacua import GeneralModelSpec, count_vacua_general, count_vacua_single_alpha, enumerate_vacua

__version__ = "0.1.0"
