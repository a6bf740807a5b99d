import numpy as np
import pytest

from fiberqed.coupling import (CouplingMatrices, Provenance, assemble,
                               chain_ensemble)
from fiberqed.errors import DomainError
from fiberqed.green_fiber import RadiationQuadratureSpec, gamma_guided
from fiberqed.transmission import (DriveSpec, SpectrumResult, steady_state,
                                   transmission_spectrum)

QUAD = RadiationQuadratureSpec()


@pytest.fixture(scope="module")
def single(omega_a, fiber, solver):
    ens = chain_ensemble(1, 1.0, 100e-9, "normal", fiber.r_f, omega_a)
    m = assemble(ens, fiber, Provenance.RADIATION_VACUUM_APPROX, quad=QUAD,
                 dispersion=solver)
    disp = solver.solve_beta(omega_a)
    return ens, m, disp


def test_drive_spec_validation():
    with pytest.raises(DomainError):
        DriveSpec(rabi=0.0)
    d = DriveSpec(rabi=0.5, detunings=[1.0])
    assert d.detunings.shape == (1,)


def test_single_atom_closed_form(single):
    """One atom: t(Delta) = 1 - (i gamma_gd / 2) / (Delta + i Gamma / 2).
    The solver must reproduce this to machine precision."""
    ens, m, disp = single
    gamma_tot = float(m.Gamma[0, 0].real)
    gamma_gd = float(np.diag(gamma_guided(ens, disp)).real[0])
    drive = DriveSpec(rabi=1e-3, detunings=np.linspace(-10, 10, 101))
    spec = transmission_spectrum(m, drive, ens, disp)
    t_ref = np.abs(1.0 - 0.5j * gamma_gd
                   / (drive.detunings + 0.5j * gamma_tot)) ** 2
    assert np.max(np.abs(spec.transmission - t_ref)) < 1e-14


def test_single_atom_resonant_dip(single):
    ens, m, disp = single
    gamma_tot = float(m.Gamma[0, 0].real)
    gamma_gd = float(np.diag(gamma_guided(ens, disp)).real[0])
    spec = transmission_spectrum(m, DriveSpec(rabi=1e-3, detunings=[0.0]),
                                 ens, disp)
    t_min = (1.0 - gamma_gd / gamma_tot) ** 2
    assert spec.transmission[0] == pytest.approx(t_min, rel=1e-12)
    assert 0.0 < spec.transmission[0] < 1.0


def test_transparent_far_off_resonance(omega_a, fiber, solver):
    ens = chain_ensemble(3, 300e-9, 100e-9, "normal", fiber.r_f, omega_a)
    m = assemble(ens, fiber, Provenance.RADIATION_VACUUM_APPROX, quad=QUAD,
                 dispersion=solver)
    disp = solver.solve_beta(omega_a)
    spec = transmission_spectrum(
        m, DriveSpec(rabi=1e-3, detunings=[-1e3, 1e3]), ens, disp)
    assert np.max(np.abs(spec.transmission - 1.0)) < 1e-3


def test_transmission_independent_of_chain_origin(omega_a, fiber, solver):
    from fiberqed.coupling import EmitterEnsemble

    disp = solver.solve_beta(omega_a)
    drive = DriveSpec(rabi=1e-3, detunings=np.linspace(-5, 5, 21))
    base = chain_ensemble(3, 300e-9, 100e-9, "parallel", fiber.r_f, omega_a)
    shifted = EmitterEnsemble(
        [(r, p, z + 4.1e-6) for (r, p, z) in base.positions],
        base.dipoles, omega_a)
    specs = []
    for ens in (base, shifted):
        m = assemble(ens, fiber, Provenance.RADIATION_VACUUM_APPROX,
                     quad=QUAD, dispersion=solver)
        specs.append(transmission_spectrum(m, drive, ens, disp).transmission)
    assert np.max(np.abs(specs[0] - specs[1])) < 1e-10


def test_empty_chain_is_transparent(omega_a, fiber, solver):
    ens = chain_ensemble(0, 1.0, 100e-9, "normal", fiber.r_f, omega_a)
    m = assemble(ens, fiber, Provenance.GUIDED_ONLY, quad=QUAD,
                 dispersion=solver)
    disp = solver.solve_beta(omega_a)
    spec = transmission_spectrum(m, DriveSpec(rabi=1.0, detunings=[0.0]),
                                 ens, disp)
    assert np.array_equal(spec.transmission, [1.0])


def test_steady_state_residual_and_singularity():
    # a lossless dark system: Gamma = 0 makes A real symmetric; at an
    # eigenvalue of V the drive hits an exact resonance with no decay
    v = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    m = CouplingMatrices(v, np.zeros((2, 2), dtype=complex),
                         Provenance.GUIDED_ONLY)
    drive = DriveSpec(rabi=1.0, detunings=[0.0])
    with pytest.raises(DomainError):
        steady_state(m, drive, -1.0, 1.0, [0.0, 1.0])  # delta = eigenvalue
    c = steady_state(m, drive, 5.0, 1.0, [0.0, 1.0])  # regular point
    assert c.shape == (2,)


def test_spectrum_result_serialization():
    spec = SpectrumResult(detunings=[0.0, 1.0], transmission=[0.5, 1.0],
                          meta={"provenance": "GuidedOnly"})
    csv_text = spec.to_csv()
    assert csv_text.startswith("delta_over_gamma,T,provenance\r\n")
    assert "GuidedOnly" in csv_text
    assert csv_text == spec.to_csv()  # deterministic
    with pytest.raises(DomainError):
        SpectrumResult(detunings=[0.0], transmission=[-0.1])
