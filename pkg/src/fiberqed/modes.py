"""Electric-field profile functions of the nanofiber.

Guided (HE11) profiles in the J/K form with the overall constant fixed by
the normalization integral, and transverse radiation-mode profiles in the
Hankel form with the boundary-matched (A, B) -> (C_j, D_j) coefficient
relations.  All vacuum-permittivity/permeability factors are eliminated
via mu0*eps0*c^2 = 1, so only k = omega/c appears.

Components are returned in the local cylindrical basis; to_cartesian
rotates them into the Cartesian frame used for dyad assembly.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as sp

from .errors import DomainError

__all__ = [
    "GuidedModeIndex",
    "RadiationModeIndex",
    "ProfileVector",
    "guided_profile",
    "guided_norm_const",
    "radiation_profile",
    "to_cartesian",
]


@dataclass(frozen=True)
class GuidedModeIndex:
    """Guided-mode labels: polarization l and propagation direction f."""

    l: int
    f: int

    def __post_init__(self):
        if self.l not in (-1, 1) or self.f not in (-1, 1):
            raise DomainError("l and f must be +1 or -1")


@dataclass(frozen=True)
class RadiationModeIndex:
    """Radiation-mode labels (omega, theta, m, l); beta = k cos(theta)."""

    omega: float
    theta: float
    m: int
    l: int

    def __post_init__(self):
        if self.l not in (-1, 1):
            raise DomainError("l must be +1 or -1")
        if not 0.0 < self.theta < math.pi:
            raise DomainError("theta must lie strictly inside (0, pi)")


CYLINDRICAL = "cylindrical"
CARTESIAN = "cartesian"


@dataclass
class ProfileVector:
    """Field components (e_r, e_phi, e_z) or (e_x, e_y, e_z)."""

    e_r: complex
    e_phi: complex
    e_z: complex
    basis: str = CYLINDRICAL

    def as_array(self):
        return np.array([self.e_r, self.e_phi, self.e_z], dtype=complex)


def to_cartesian(v: ProfileVector, phi: float) -> ProfileVector:
    """Rotate a cylindrical-basis profile at azimuth phi into Cartesian."""
    if v.basis != CYLINDRICAL:
        raise DomainError("profile is not in a cylindrical basis")
    c, s = math.cos(phi), math.sin(phi)
    return ProfileVector(
        e_r=v.e_r * c - v.e_phi * s,
        e_phi=v.e_r * s + v.e_phi * c,
        e_z=v.e_z,
        basis=CARTESIAN,
    )


# ---------------------------------------------------------------------------
# guided modes
# ---------------------------------------------------------------------------

def _guided_components_unnorm(disp, r):
    """(e_r/iC, e_phi/(lC), e_z/(fC)) with C = 1, i.e. the shape functions.

    Returns the three real shape factors (gr, gphi, gz) such that
    e_r = i*C*gr, e_phi = l*C*gphi, e_z = f*C*gz.
    """
    s = disp.s
    q = disp.q
    kappa = disp.kappa
    beta = disp.beta
    r_f = disp.r_f
    if r < r_f:
        ratio = sp.kv(1, q * r_f) / sp.jv(1, kappa * r_f)
        j0 = sp.jv(0, kappa * r)
        j2 = sp.jv(2, kappa * r)
        gr = (q / kappa) * ratio * ((1 - s) * j0 - (1 + s) * j2)
        gphi = -(q / kappa) * ratio * ((1 - s) * j0 + (1 + s) * j2)
        gz = (2 * q / beta) * ratio * sp.jv(1, kappa * r)
    else:
        k0 = sp.kv(0, q * r)
        k2 = sp.kv(2, q * r)
        gr = (1 - s) * k0 + (1 + s) * k2
        gphi = (1 + s) * k2 - (1 - s) * k0
        gz = (2 * q / beta) * sp.kv(1, q * r)
    return gr, gphi, gz


def guided_norm_const(disp):
    """Normalization constant C from 2*pi*int eps(r)|e|^2 r dr = 1.

    Cached on the dispersion point; the integral is split at the fiber
    surface, with the evanescent exterior truncated where K_m has decayed
    below double precision.
    """
    if disp.norm_const is not None:
        return disp.norm_const

    def dens(r):
        gr, gphi, gz = _guided_components_unnorm(disp, r)
        return (gr * gr + gphi * gphi + gz * gz) * r

    n1sq = disp.n1 ** 2
    inner, _ = integrate.quad(dens, 0.0, disp.r_f, limit=200)
    r_out = disp.r_f + 45.0 / disp.q  # K_m(q r) ~ e^{-q r}: tail below 1e-39
    outer, _ = integrate.quad(dens, disp.r_f, r_out, limit=200)
    total = 2.0 * math.pi * (n1sq * inner + outer)
    c_norm = 1.0 / math.sqrt(total)
    disp.norm_const = c_norm
    return c_norm


def guided_profile(disp, idx: GuidedModeIndex, r: float) -> ProfileVector:
    """Normalized guided profile e^(mu)(r) in the cylindrical basis."""
    if r < 0:
        raise DomainError("radius must be non-negative")
    c_norm = guided_norm_const(disp)
    gr, gphi, gz = _guided_components_unnorm(disp, r)
    return ProfileVector(
        e_r=1j * c_norm * gr,
        e_phi=idx.l * c_norm * gphi,
        e_z=idx.f * c_norm * gz,
        basis=CYLINDRICAL,
    )


# ---------------------------------------------------------------------------
# radiation modes
# ---------------------------------------------------------------------------

def _hankel(m, x, j):
    h = sp.jv(m, x) + 1j * sp.yv(m, x)
    return h if j == 1 else np.conj(h)


def _hankel_deriv(m, x, j):
    h = sp.jvp(m, x) + 1j * sp.yvp(m, x)
    return h if j == 1 else np.conj(h)


def radiation_coefficients(k, n1, r_f, m, l, theta):
    """Boundary-matched coefficients for a transverse radiation mode.

    Returns (A, B_over_ilA_scaled, C[2], Dhat[2], beta, q, kappa) where
    Dhat_j = D_j / (eps0 c) so that no eps0/mu0 factor survives, and A is
    real positive, fixed by the normalization identity
    1 = (16 pi^2 k^2 / q^3) (|C_j|^2 + |Dhat_j|^2).
    """
    beta = k * math.cos(theta)
    q = k * math.sin(theta)
    if q <= 0.0:
        raise DomainError("theta must be strictly inside (0, pi): q = 0 degenerates")
    kappa = k * math.sqrt(n1 * n1 - math.cos(theta) ** 2)
    xf = kappa * r_f
    yf = q * r_f
    jm = sp.jv(m, xf)
    jmp = sp.jvp(m, xf)
    # V_j, M_j, L_j carry conjugated Hankel factors; for real arguments
    # H^(1)* = H^(2), so j = 2 entries are conjugates of j = 1.
    v1 = (m * k * beta / (r_f * kappa**2 * q**2)) * (1.0 - n1 * n1) * jm \
        * np.conj(_hankel(m, yf, 1))
    m1 = jmp * np.conj(_hankel(m, yf, 1)) / kappa \
        - jm * np.conj(_hankel_deriv(m, yf, 1)) / q
    l1 = (n1 * n1) * jmp * np.conj(_hankel(m, yf, 1)) / kappa \
        - jm * np.conj(_hankel_deriv(m, yf, 1)) / q
    eta = math.sqrt((abs(v1) ** 2 + abs(l1) ** 2) / (abs(v1) ** 2 + abs(m1) ** 2))

    pref = 1j * math.pi * q * q * r_f / 4.0
    c_list = []
    d_list = []
    for j in (1, 2):
        vj = v1 if j == 1 else np.conj(v1)
        mj = m1 if j == 1 else np.conj(m1)
        lj = l1 if j == 1 else np.conj(l1)
        sign_c = (-1.0) ** j
        sign_d = (-1.0) ** (j - 1)
        # B = i l eta_tilde A in eps0*c units; mu0 c B -> i l eta_tilde A
        c_list.append(sign_c * pref * (lj - l * eta * vj))
        d_list.append(sign_d * pref * 1j * (vj - l * eta * mj))
    c_arr = np.array(c_list)
    d_arr = np.array(d_list)
    norm = (16.0 * math.pi**2 * k * k / q**3) * (abs(c_arr[0]) ** 2 + abs(d_arr[0]) ** 2)
    a = 1.0 / math.sqrt(norm)
    return a, l * eta, a * c_arr, a * d_arr, beta, q, kappa


def radiation_profile(fiber_k_n1_rf, idx: RadiationModeIndex, r: float) -> ProfileVector:
    """Normalized transverse radiation profile e^(nu)(r), cylindrical basis.

    fiber_k_n1_rf: (k, n1, r_f) tuple; n1 evaluated at idx.omega by the
    caller so this stays a pure function of numbers.
    """
    k, n1, r_f = fiber_k_n1_rf
    if r < 0:
        raise DomainError("radius must be non-negative")
    m, l = idx.m, idx.l
    a, leta, c_arr, d_arr, beta, q, kappa = radiation_coefficients(
        k, n1, r_f, m, l, idx.theta)
    if r < r_f:
        jm = sp.jv(m, kappa * r)
        jmp = sp.jvp(m, kappa * r)
        # interior: B = i l eta A folded in (k factors replace omega*mu0)
        e_r = 1j * beta / kappa * a * jmp \
            - (m * k / (kappa**2 * r) * (1j * leta * a) * jm if r > 0 else 0.0)
        e_phi = (-m * beta / (kappa**2 * r) * a * jm if r > 0 else 0.0) \
            - 1j * k / kappa * (1j * leta * a) * jmp
        e_z = a * jm
    else:
        e_r = 0.0
        e_phi = 0.0
        e_z = 0.0
        for j in (1, 2):
            hm = _hankel(m, q * r, j)
            hmp = _hankel_deriv(m, q * r, j)
            cj = c_arr[j - 1]
            dj = d_arr[j - 1]
            e_r += 1j * beta / q * cj * hmp - m * k / (q * q * r) * dj * hm
            e_phi += -m * beta / (q * q * r) * cj * hm - 1j * k / q * dj * hmp
            e_z += cj * hm
    return ProfileVector(e_r=complex(e_r), e_phi=complex(e_phi),
                         e_z=complex(e_z), basis=CYLINDRICAL)
