"""Guided and radiation Green's-tensor contributions near the fiber.

Imaginary parts of G^gd and G^rd as mode sums, plus the closed-form
guided coupling matrices Gamma^gd and V^gd.  All matrices are returned in
units of the vacuum decay rate gamma.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT
from .errors import ConvergenceError, DomainError
from .green_vacuum import ComplexDyad
from .kernel import radiation_dyad
from .modes import GuidedModeIndex, guided_profile, to_cartesian

__all__ = [
    "RadiationQuadratureSpec",
    "cyl_to_cart",
    "im_g_guided",
    "gamma_guided",
    "v_guided",
    "im_g_radiation",
    "gamma_radiation",
]


@dataclass(frozen=True)
class RadiationQuadratureSpec:
    """Truncation/quadrature controls for the radiation mode sum.

    m_cut/theta_order of None means "auto from geometry and frequency".
    rel_tol is the adaptivity certificate: results must be stable at this
    level under (m_cut+2, 2x theta_order).
    """

    m_cut: int = None
    theta_order: int = None
    rel_tol: float = 1e-3

    def resolved_m_cut(self, k, r_max):
        if self.m_cut is not None:
            return self.m_cut
        return int(math.ceil(k * r_max)) + 8

    def resolved_theta_order(self, k, r_a, r_b, dz):
        if self.theta_order is not None:
            return self.theta_order
        # resolve both the Hankel radial oscillation (~ k r) and the
        # e^{i k cos(theta) dz} longitudinal oscillation (~ k |dz|)
        osc = k * (r_a + r_b + abs(dz)) / math.pi
        return max(64, int(math.ceil(10.0 * osc)))


def cyl_to_cart(pos):
    """(r, phi, z) -> Cartesian (x, y, z)."""
    r, phi, z = pos
    return np.array([r * math.cos(phi), r * math.sin(phi), z])


def _gauss_open(n):
    """Gauss-Legendre rule with >= n nodes on (0, pi); endpoints never
    sampled.  Large n uses a composite 24-point rule on uniform panels:
    single-rule node generation is O(n^2) and becomes the bottleneck.
    """
    if n <= 600:
        x, w = np.polynomial.legendre.leggauss(n)
        return 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w
    per = 24
    panels = -(-n // per)
    x, w = np.polynomial.legendre.leggauss(per)
    edges = np.linspace(0.0, math.pi, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    centers = 0.5 * (edges[:-1] + edges[1:])
    nodes = (centers[:, None] + half * x[None, :]).ravel()
    weights = np.broadcast_to(half * w, (panels, per)).ravel()
    return nodes, weights


def _check_outside(pos, r_f):
    if pos[0] <= r_f:
        raise DomainError(
            f"emitter radius {pos[0]} is not outside the fiber (r_f = {r_f})")


# ---------------------------------------------------------------------------
# guided contribution
# ---------------------------------------------------------------------------

def _guided_channel_vectors(disp, pos):
    """Cartesian e^(mu) at pos for the four (l, f) channels, with the
    e^{il phi} e^{if beta z} mode phase folded in."""
    r, phi, z = pos
    out = {}
    for l in (-1, 1):
        for f in (-1, 1):
            prof = guided_profile(disp, GuidedModeIndex(l=l, f=f), r)
            vec = to_cartesian(prof, phi).as_array()
            out[(l, f)] = vec * np.exp(1j * (l * phi + f * disp.beta * z))
    return out


def im_g_guided(pos_a, pos_b, disp):
    """Im{G^gd}(r_a, r_b, omega) as a Cartesian ComplexDyad."""
    _check_outside(pos_a, disp.r_f)
    _check_outside(pos_b, disp.r_f)
    va = _guided_channel_vectors(disp, pos_a)
    vb = _guided_channel_vectors(disp, pos_b)
    acc = np.zeros((3, 3), dtype=complex)
    for key, ea in va.items():
        acc += np.outer(ea, np.conj(vb[key]))
    acc *= C_LIGHT**2 * disp.beta_prime / (4.0 * disp.omega)
    return ComplexDyad(acc, cyl_to_cart(pos_a), cyl_to_cart(pos_b), disp.omega)


def _guided_amplitudes(ensemble, disp):
    """g[alpha, (l,f)] = d_alpha* . e^(mu)(r_alpha) with mode phases."""
    amps = np.zeros((len(ensemble.positions), 4), dtype=complex)
    keys = [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    for i, (pos, dip) in enumerate(zip(ensemble.positions, ensemble.dipoles)):
        _check_outside(pos, disp.r_f)
        vecs = _guided_channel_vectors(disp, pos)
        for j, key in enumerate(keys):
            amps[i, j] = np.conj(dip) @ vecs[key]
    return amps, keys


def gamma_guided(ensemble, disp):
    """Guided collective decay matrix Gamma^gd / gamma (hermitian PSD)."""
    amps, _ = _guided_amplitudes(ensemble, disp)
    scale = 3.0 * math.pi * C_LIGHT**3 * disp.beta_prime / (2.0 * ensemble.omega_a**2)
    return scale * (amps @ np.conj(amps.T))


def v_guided(ensemble, disp):
    """Guided dipole-dipole matrix V^gd / gamma; diagonal is zero.

    Pairs with z_alpha = z_beta are rejected: the sgn(f z) factor of the
    contour result is undefined at coincident z.
    """
    amps, keys = _guided_amplitudes(ensemble, disp)
    n = len(ensemble.positions)
    z = np.array([p[2] for p in ensemble.positions])
    scale = 3.0 * math.pi * C_LIGHT**3 * disp.beta_prime / (4.0 * ensemble.omega_a**2)
    out = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(a + 1, n):
            dz = z[a] - z[b]
            if dz == 0.0:
                raise DomainError(
                    f"V^gd undefined for emitters {a}, {b} at equal z "
                    "(sgn factor has no value at z_ab = 0)")
            val = 0.0j
            for j, (_, f) in enumerate(keys):
                val += amps[a, j] * np.conj(amps[b, j]) * math.copysign(1.0, f * dz)
            out[a, b] = 1j * scale * val
            out[b, a] = np.conj(out[a, b])
    return out


# ---------------------------------------------------------------------------
# radiation contribution
# ---------------------------------------------------------------------------

def _radiation_dyad_raw(pos_a, pos_b, omega, fiber, quad, kernel=radiation_dyad):
    k = omega / C_LIGHT
    n1 = fiber.index_clamped(omega)
    r_a, phi_a, z_a = pos_a
    r_b, phi_b, z_b = pos_b
    m_cut = quad.resolved_m_cut(k, max(r_a, r_b))
    n_theta = quad.resolved_theta_order(k, r_a, r_b, z_a - z_b)
    nodes, weights = _gauss_open(n_theta)
    return kernel(k, n1, fiber.r_f, r_a, phi_a, z_a, r_b, phi_b, z_b,
                  m_cut, nodes, weights), m_cut, n_theta


def im_g_radiation(pos_a, pos_b, omega, fiber, quad=None, certify=False):
    """Im{G^rd}(r_a, r_b, omega) as a Cartesian ComplexDyad.

    With certify=True the result is recomputed at (m_cut+2, 2x theta
    order) and must agree within quad.rel_tol, else ConvergenceError.
    """
    quad = quad or RadiationQuadratureSpec()
    _check_outside(pos_a, fiber.r_f)
    _check_outside(pos_b, fiber.r_f)
    dyad, m_cut, n_theta = _radiation_dyad_raw(pos_a, pos_b, omega, fiber, quad)
    if certify:
        finer = RadiationQuadratureSpec(
            m_cut=m_cut + 2, theta_order=2 * n_theta, rel_tol=quad.rel_tol)
        ref, _, _ = _radiation_dyad_raw(pos_a, pos_b, omega, fiber, finer)
        scale = max(np.max(np.abs(ref)), 1e-300)
        err = np.max(np.abs(dyad - ref)) / scale
        if err > quad.rel_tol:
            raise ConvergenceError(
                f"radiation dyad not converged at m_cut={m_cut}, "
                f"n_theta={n_theta}: certificate error {err:.3e} "
                f"> rel_tol {quad.rel_tol:.3e}", achieved_tol=err)
    return ComplexDyad(dyad, cyl_to_cart(pos_a), cyl_to_cart(pos_b), omega)


def gamma_radiation(ensemble, fiber, quad=None, certify=False):
    """Radiation collective decay matrix Gamma^rd / gamma (hermitian PSD)."""
    quad = quad or RadiationQuadratureSpec()
    n = len(ensemble.positions)
    omega = ensemble.omega_a
    scale = 6.0 * math.pi * C_LIGHT / omega
    out = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(a, n):
            dyad = im_g_radiation(ensemble.positions[a], ensemble.positions[b],
                                  omega, fiber, quad, certify=certify)
            val = scale * (np.conj(ensemble.dipoles[a])
                           @ dyad.entries @ ensemble.dipoles[b])
            out[a, b] = val
            if a != b:
                out[b, a] = np.conj(val)
    return out
