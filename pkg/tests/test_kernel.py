import numpy as np
import pytest

from fiberqed.constants import C_LIGHT
from fiberqed.green_fiber import _gauss_open
from fiberqed.kernel import available_backends, get_kernel

R_F = 250e-9


def _dyad(kernel, omega, n1, dz, dphi=0.4):
    k = omega / C_LIGHT
    r_a = R_F + 100e-9
    r_b = R_F + 160e-9
    nodes, weights = _gauss_open(256)
    return kernel(k, complex(n1), R_F, r_a, 0.0, dz, r_b, dphi, 0.0,
                  30, nodes, weights)


@pytest.mark.skipif("cython" not in available_backends(),
                    reason="compiled backend not built")
@pytest.mark.parametrize("omega_mult", [1.0, 7.0, 30.0])
@pytest.mark.parametrize("n1", [1.45, 1.45 + 0.0j])
def test_backend_parity(omega_a, omega_mult, n1):
    py = get_kernel("python")
    cy = get_kernel("cython")
    dp = _dyad(py, omega_mult * omega_a, n1, dz=400e-9)
    dc = _dyad(cy, omega_mult * omega_a, n1, dz=400e-9)
    scale = np.max(np.abs(dp))
    assert np.max(np.abs(dp - dc)) <= 1e-10 * scale


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        get_kernel("fortran")


def test_python_backend_always_available():
    assert "python" in available_backends()


def test_dyad_hermitian_at_coincident_points(omega_a):
    """Im{G} at coincident points is a real symmetric PSD matrix (it is
    a power spectral density)."""
    kernel = get_kernel("python")
    k = omega_a / C_LIGHT
    nodes, weights = _gauss_open(256)
    d = kernel(k, complex(1.45), R_F, R_F + 100e-9, 0.0, 0.0,
               R_F + 100e-9, 0.0, 0.0, 30, nodes, weights)
    assert np.max(np.abs(d.imag)) <= 1e-12 * np.max(np.abs(d))
    assert np.max(np.abs(d - d.T)) <= 1e-12 * np.max(np.abs(d))
    assert np.min(np.linalg.eigvalsh(d.real)) >= -1e-12 * np.max(np.abs(d))


def test_dyad_reciprocity_under_swap(omega_a):
    kernel = get_kernel("python")
    k = omega_a / C_LIGHT
    nodes, weights = _gauss_open(256)
    args = (30, nodes, weights)
    a = kernel(k, complex(1.45), R_F, R_F + 80e-9, 0.1, 0.0,
               R_F + 150e-9, 0.7, 300e-9, *args)
    b = kernel(k, complex(1.45), R_F, R_F + 150e-9, 0.7, 300e-9,
               R_F + 80e-9, 0.1, 0.0, *args)
    assert np.allclose(a, b.T, rtol=1e-10, atol=1e-12 * np.max(np.abs(a)))
