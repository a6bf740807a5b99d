import numpy as np
import pytest

from fiberqed.coupling import EmitterEnsemble, chain_ensemble
from fiberqed.errors import DomainError
from fiberqed.green_fiber import (RadiationQuadratureSpec, cyl_to_cart,
                                  gamma_guided, gamma_radiation,
                                  im_g_guided, im_g_radiation, v_guided)
from fiberqed.green_vacuum import v0_gamma0

QUAD = RadiationQuadratureSpec()


def _pair(omega_a, r_f, x_a=100e-9, dz=300e-9, orientation="normal"):
    return chain_ensemble(2, dz, x_a, orientation, r_f, omega_a)


def test_gamma_guided_hermitian_psd(omega_a, fiber, disp):
    ens = _pair(omega_a, fiber.r_f)
    g = gamma_guided(ens, disp)
    assert np.allclose(g, g.conj().T, atol=1e-14)
    assert np.min(np.linalg.eigvalsh(g).real) >= -1e-12
    assert g[0, 0].real > 0


def test_guided_dyad_reciprocity(omega_a, fiber, disp):
    pa = (fiber.r_f + 80e-9, 0.3, 0.0)
    pb = (fiber.r_f + 150e-9, 1.1, 400e-9)
    ga = im_g_guided(pa, pb, disp).entries
    gb = im_g_guided(pb, pa, disp).entries
    assert np.allclose(ga, gb.T, rtol=1e-12, atol=1e-12 * np.max(np.abs(ga)))


def test_radiation_dyad_reciprocity(omega_a, fiber):
    pa = (fiber.r_f + 80e-9, 0.3, 0.0)
    pb = (fiber.r_f + 150e-9, 1.1, 400e-9)
    ga = im_g_radiation(pa, pb, omega_a, fiber, QUAD).entries
    gb = im_g_radiation(pb, pa, omega_a, fiber, QUAD).entries
    assert np.allclose(ga, gb.T, rtol=1e-10, atol=1e-10 * np.max(np.abs(ga)))


def test_radiation_certificate_at_transition(omega_a, fiber):
    pa = (fiber.r_f + 50e-9, 0.0, 0.0)
    pb = (fiber.r_f + 50e-9, 0.0, 852e-9)
    # certify=True re-evaluates at (m_cut + 2, 2x theta order) and raises
    # ConvergenceError if the result moves more than rel_tol
    im_g_radiation(pa, pb, omega_a, fiber, QUAD, certify=True)


def test_inside_fiber_rejected(omega_a, fiber, disp):
    with pytest.raises(DomainError):
        im_g_guided((0.5 * fiber.r_f, 0.0, 0.0),
                    (fiber.r_f + 100e-9, 0.0, 0.0), disp)
    with pytest.raises(DomainError):
        im_g_radiation((0.5 * fiber.r_f, 0.0, 0.0),
                       (fiber.r_f + 100e-9, 0.0, 0.0), omega_a, fiber, QUAD)


def test_total_single_atom_decay_physical(omega_a, fiber, disp):
    """Near the surface the total rate is Purcell-enhanced above gamma;
    far away it returns to the vacuum rate."""
    for x_a, lo, hi in ((100e-9, 1.0, 2.5), (3 * 852e-9, 0.97, 1.03)):
        ens = EmitterEnsemble([(fiber.r_f + x_a, 0.0, 0.0)],
                              np.array([[1.0, 0.0, 0.0]]), omega_a)
        total = (gamma_guided(ens, disp) + gamma_radiation(ens, fiber, QUAD))
        assert lo < total[0, 0].real < hi


def test_radiation_vacuum_fiber_reduces_to_free_space(omega_a, vacuum_fiber):
    """With the fiber index forced to 1 the radiation modes are the free
    continuum: Gamma^rd must reproduce the analytic vacuum pair rate."""
    x_a, dz = 100e-9, 500e-9
    ens = chain_ensemble(2, dz, x_a, "normal", vacuum_fiber.r_f, omega_a)
    g = gamma_radiation(ens, vacuum_fiber, QUAD)
    _, g0_val = v0_gamma0(ens.dipoles[0], ens.dipoles[1],
                          cyl_to_cart(ens.positions[0]),
                          cyl_to_cart(ens.positions[1]), omega_a)
    assert g[0, 0].real == pytest.approx(1.0, rel=0.02)
    assert g[0, 1].real == pytest.approx(g0_val.real, rel=0.02)


def test_guided_matrices_translation_invariant(omega_a, fiber, disp):
    base = chain_ensemble(3, 400e-9, 100e-9, "parallel", fiber.r_f, omega_a)
    shifted = EmitterEnsemble(
        [(r, p, z + 1.7e-6) for (r, p, z) in base.positions],
        base.dipoles, omega_a)
    for fn in (gamma_guided, v_guided):
        a = fn(base, disp)
        b = fn(shifted, disp)
        assert np.allclose(a, b, rtol=0, atol=1e-12 * np.max(np.abs(a)))


def test_quadrature_spec_auto_scaling():
    q = RadiationQuadratureSpec()
    assert q.resolved_m_cut(7e6, 400e-9) > q.resolved_m_cut(7e6, 300e-9) - 1
    assert q.resolved_theta_order(7e7, 3e-7, 3e-7, 1e-5) \
        > q.resolved_theta_order(7e7, 3e-7, 3e-7, 1e-6)
    fixed = RadiationQuadratureSpec(m_cut=5, theta_order=77)
    assert fixed.resolved_m_cut(1e9, 1e-6) == 5
    assert fixed.resolved_theta_order(1e9, 1e-6, 1e-6, 1e-5) == 77
