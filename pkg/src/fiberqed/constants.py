"""Physical constants used throughout the package.

Every reported rate is expressed in units of the vacuum decay rate
gamma = |d|^2 w_a^3 / (3 pi eps0 hbar c^3), so hbar and eps0 cancel in all
outputs.  The formulas are arranged internally so that only the speed of
light survives (mu0*eps0*c^2 = 1 eliminates the rest).
"""

import math

from scipy.constants import c as C_LIGHT  # m/s, exact

__all__ = ["C_LIGHT", "gamma_prefactor_v", "gamma_prefactor_g"]


def gamma_prefactor_v(omega_a):
    """Scale factor turning d*.Re{G}.d [1/m] into V/gamma (unit dipoles)."""
    return 3.0 * math.pi * C_LIGHT / omega_a


def gamma_prefactor_g(omega_a):
    """Scale factor turning d*.Im{G}.d [1/m] into Gamma/gamma (unit dipoles)."""
    return 6.0 * math.pi * C_LIGHT / omega_a
