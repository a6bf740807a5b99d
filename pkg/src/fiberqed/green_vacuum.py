"""Free-space electromagnetic Green's tensor and vacuum pair couplings.

This is the analytic reference every numerical scheme in the package is
checked against: the closed-form tensor, its longitudinal/transverse
split, and the vacuum dipole-dipole shift V0 and collective decay Gamma0
(reported in units of the single-emitter vacuum decay rate gamma).
"""

from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, gamma_prefactor_g, gamma_prefactor_v
from .errors import DomainError

__all__ = [
    "ComplexDyad",
    "g0",
    "g0_longitudinal",
    "g0_transverse",
    "v0_gamma0",
]


@dataclass
class ComplexDyad:
    """3x3 complex tensor in the Cartesian frame, tagged with its two
    evaluation points and the frequency."""

    entries: np.ndarray
    r_a: np.ndarray
    r_b: np.ndarray
    omega: float

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        self.r_a = np.asarray(self.r_a, dtype=float)
        self.r_b = np.asarray(self.r_b, dtype=float)
        if self.entries.shape != (3, 3):
            raise DomainError("dyad entries must be 3x3")


def _separation(r_a, r_b):
    r_a = np.asarray(r_a, dtype=float)
    r_b = np.asarray(r_b, dtype=float)
    rt = r_a - r_b
    dist = float(np.linalg.norm(rt))
    if dist == 0.0:
        raise DomainError("coincident points: vacuum Green's tensor diverges")
    return rt, dist


def g0(r_a, r_b, omega):
    """Vacuum Green's tensor G0(r_a, r_b, omega), Cartesian frame."""
    rt, dist = _separation(r_a, r_b)
    k = omega / C_LIGHT
    rhat = rt / dist
    proj = np.outer(rhat, rhat)
    eye = np.eye(3)
    kr = k * dist
    entries = (
        k
        * np.exp(1j * kr)
        / (4.0 * np.pi)
        * (
            (eye - proj) / kr
            + (3.0 * proj - eye) * (1.0 / kr**3 - 1j / kr**2)
        )
    )
    return ComplexDyad(entries, r_a, r_b, omega)


def g0_longitudinal(r_a, r_b, omega):
    """Longitudinal (curl-free) part: (3 rhat rhat - 1) / (4 pi r^3 k^2).

    Purely real; carries the second-order pole at omega = 0 that breaks
    the plain Kramers-Kronig relation for the full tensor.
    """
    rt, dist = _separation(r_a, r_b)
    k = omega / C_LIGHT
    rhat = rt / dist
    proj = np.outer(rhat, rhat)
    entries = (3.0 * proj - np.eye(3)) / (4.0 * np.pi * dist**3 * k**2)
    return ComplexDyad(entries.astype(complex), r_a, r_b, omega)


def g0_transverse(r_a, r_b, omega):
    """Transverse (divergence-free) part, g0 minus the longitudinal part."""
    full = g0(r_a, r_b, omega)
    lon = g0_longitudinal(r_a, r_b, omega)
    return ComplexDyad(full.entries - lon.entries, r_a, r_b, omega)


def _sandwich(d_a, dyad_entries, d_b):
    return np.conj(np.asarray(d_a)) @ dyad_entries @ np.asarray(d_b)


def v0_gamma0(d_a, d_b, r_a, r_b, omega_a):
    """Vacuum V0 and Gamma0 for a pair of unit dipoles, in gamma units.

    V0/gamma     = (3 pi c / w_a) * d_a*.Re{G0}.d_b
    Gamma0/gamma = (6 pi c / w_a) * d_a*.Im{G0}.d_b

    Complex for conjugate-mismatched dipole pairs (the matrices V, Gamma
    are hermitian, not real); real dipoles give real rates.
    """
    dyad = g0(r_a, r_b, omega_a)
    v = gamma_prefactor_v(omega_a) * _sandwich(d_a, dyad.entries.real, d_b)
    g = gamma_prefactor_g(omega_a) * _sandwich(d_a, dyad.entries.imag, d_b)
    return complex(v), complex(g)
