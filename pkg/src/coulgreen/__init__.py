"""Closed-form integrals of the reduced Coulomb Green's function."""
from .integrals import (IntegralResult, const_A12, const_B, identity_c, identity_d,
                        identity_h, j_high, j_low, j_mom, k_gen, k_high, k_low)
from .moments import script_f, script_g, script_i
from .numerics import (DomainError, PrecisionContext, ToleranceError, TrackedValue,
                       binomial, compensated_sum)
from .rcgf import QuantumIndex, a_coeffs, green, green_high, green_low, phi_nl, radial_wf
from .ukernel import capI_mn, f_ab, g_ab, u_ab

__version__ = "0.1.0"
