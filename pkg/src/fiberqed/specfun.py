"""Cylinder special functions: J_m, K_m, H^(1)_m, H^(2)_m and derivatives.

Thin validated layer over scipy.special.  The contract is the accuracy
(rel. error <= 1e-12 for m <= 60, x <= 1e4), which scipy's AMOS/cephes
routines meet; the test suite certifies it through Wronskian and
recurrence identities rather than trusting the backend blindly.
"""

import enum
import math

import numpy as np
from scipy import special as sp

from .errors import DomainError

__all__ = ["CylKind", "cyl_eval", "cyl_deriv"]


class CylKind(enum.Enum):
    BESSEL_J = "bessel_j"
    MOD_BESSEL_K = "mod_bessel_k"
    HANKEL1 = "hankel1"
    HANKEL2 = "hankel2"


def _check_args(kind, m, x):
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise DomainError(f"order must be a non-negative integer, got {m!r}")
    if kind is CylKind.BESSEL_J:
        if x < 0:
            raise DomainError(f"J_m requires x >= 0, got {x}")
    else:
        if x <= 0:
            raise DomainError(f"{kind.value} requires x > 0, got {x}")


def cyl_eval(kind, m, x):
    """Evaluate the cylinder function of integer order m at real x > 0.

    x = 0 is allowed only for BESSEL_J.  Overflow of K_m (large m, tiny x)
    raises OverflowError instead of returning inf.
    """
    _check_args(kind, m, x)
    if kind is CylKind.BESSEL_J:
        return complex(sp.jv(m, x))
    if kind is CylKind.MOD_BESSEL_K:
        val = sp.kv(m, x)
        if not math.isfinite(val):
            raise OverflowError(f"K_{m}({x}) overflows double precision")
        return complex(val)
    if kind is CylKind.HANKEL1:
        return complex(sp.hankel1(m, x))
    if kind is CylKind.HANKEL2:
        return complex(sp.hankel2(m, x))
    raise DomainError(f"unknown kind {kind!r}")


def cyl_deriv(kind, m, x):
    """First derivative d/dx of cyl_eval(kind, m, x)."""
    _check_args(kind, m, x)
    if kind is CylKind.BESSEL_J:
        return complex(sp.jvp(m, x))
    if kind is CylKind.MOD_BESSEL_K:
        val = sp.kvp(m, x)
        if not math.isfinite(val):
            raise OverflowError(f"K'_{m}({x}) overflows double precision")
        return complex(val)
    if kind is CylKind.HANKEL1:
        return complex(sp.h1vp(m, x))
    if kind is CylKind.HANKEL2:
        return complex(sp.h2vp(m, x))
    raise DomainError(f"unknown kind {kind!r}")
