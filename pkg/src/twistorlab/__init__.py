"""Twistor spinors on Lorentzian symmetric spaces, checked numerically."""
from .clifford import CliffordModel, Signature, build_model, omega_element, split_projectors, u_basis, vector_multiply
from .estimators import InvariantSubspace, TwistorRankProbe
from .quotients import SpinStructureCase, enumerate_spin_structures, invariant_dimension, q_value
from .solutions import (
    SolutionFamily, cahen_wallach_parallel_family, covering_family, flat_family, hypersurface_family,
    mpm_family, twistor_family,
)
from .spaces import (
    CahenWallach, Covering, Flat, PseudoHyperbolic, PseudoSphere, curvature_oracle, m_minus, m_plus,
    space_from_dict,
)
from .spinops import SpinorField, dirac, integrability_check, spinor_derivative, twistor_residual

__version__ = "0.1.0"
