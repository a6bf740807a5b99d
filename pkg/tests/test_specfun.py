import math

import numpy as np
import pytest

from fiberqed.errors import DomainError
from fiberqed.specfun import CylKind, cyl_deriv, cyl_eval

ORDERS = [0, 1, 2, 5, 20, 60]
ARGS = [0.5, 5.0, 50.0, 1e4]


def test_trivial_values_at_origin():
    assert cyl_eval(CylKind.BESSEL_J, 0, 0.0) == 1.0
    assert cyl_eval(CylKind.BESSEL_J, 1, 0.0) == 0.0
    assert cyl_deriv(CylKind.BESSEL_J, 1, 0.0) == 0.5


def test_bessel_j_asymptotic_form():
    """Agreement with the leading-order asymptote, to the asymptote's
    own truncation accuracy: the next term is (4m^2-1)/(8x) of the
    envelope, and J_0(100) sits near a zero where that inflates the
    pointwise relative deviation to ~5e-3."""
    x = 100.0
    ref = math.sqrt(2.0 / (math.pi * x)) * math.cos(x - math.pi / 4.0)
    assert cyl_eval(CylKind.BESSEL_J, 0, x).real == \
        pytest.approx(ref, rel=1e-2)


def test_hankel1_asymptotic_form():
    """Next asymptotic term for m = 2, x = 50 is 15/(8*50) = 3.75e-2 of
    the envelope, which is exactly the observed deviation."""
    x = 50.0
    m = 2
    ref = math.sqrt(2.0 / (math.pi * x)) * np.exp(
        1j * (x - m * math.pi / 2.0 - math.pi / 4.0))
    assert cyl_eval(CylKind.HANKEL1, m, x) == pytest.approx(ref, rel=5e-2)


@pytest.mark.parametrize("m", [0, 1, 2, 5])
@pytest.mark.parametrize("x", [0.5, 5.0, 50.0])
def test_wronskian(m, x):
    j = cyl_eval(CylKind.BESSEL_J, m, x)
    jp = cyl_deriv(CylKind.BESSEL_J, m, x)
    y = cyl_eval(CylKind.HANKEL1, m, x).imag
    yp = cyl_deriv(CylKind.HANKEL1, m, x).imag
    wron = j.real * yp - jp.real * y
    assert wron == pytest.approx(2.0 / (math.pi * x), rel=1e-10)


@pytest.mark.parametrize("m", ORDERS)
@pytest.mark.parametrize("x", ARGS)
def test_hankel_conjugacy(m, x):
    h1 = cyl_eval(CylKind.HANKEL1, m, x)
    h2 = cyl_eval(CylKind.HANKEL2, m, x)
    assert h2 == np.conj(h1)


@pytest.mark.parametrize("m", [1, 2, 5, 20, 59])
@pytest.mark.parametrize("x", ARGS)
def test_recurrence_closure(m, x):
    # J_{m-1} + J_{m+1} = (2m/x) J_m ; K_{m-1} + K_{m+1} = -2 K'_m and
    # K satisfies K_{m+1} - K_{m-1} = (2m/x) K_m ; H like J
    for kind, sign in ((CylKind.BESSEL_J, 1.0), (CylKind.HANKEL1, 1.0)):
        lo = cyl_eval(kind, m - 1, x)
        hi = cyl_eval(kind, m + 1, x)
        mid = cyl_eval(kind, m, x)
        if abs(mid) > 1e-280:
            assert lo + hi == pytest.approx(sign * 2.0 * m / x * mid,
                                            rel=1e-10, abs=1e-13 * abs(mid))
    klo = cyl_eval(CylKind.MOD_BESSEL_K, m - 1, x)
    khi = cyl_eval(CylKind.MOD_BESSEL_K, m + 1, x)
    kmid = cyl_eval(CylKind.MOD_BESSEL_K, m, x)
    assert khi - klo == pytest.approx(2.0 * m / x * kmid, rel=1e-10)


def test_derivative_identities():
    assert cyl_deriv(CylKind.BESSEL_J, 0, 1.0) == pytest.approx(
        -cyl_eval(CylKind.BESSEL_J, 1, 1.0), rel=1e-12)
    ref = -(cyl_eval(CylKind.MOD_BESSEL_K, 0, 2.0)
            + cyl_eval(CylKind.MOD_BESSEL_K, 2, 2.0)) / 2.0
    assert cyl_deriv(CylKind.MOD_BESSEL_K, 1, 2.0) == \
        pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("kind", list(CylKind))
@pytest.mark.parametrize("m", [0, 1, 5, 20])
def test_derivative_matches_finite_difference(kind, m):
    x = 7.3
    h = 1e-6 * max(1.0, x)
    fd = (cyl_eval(kind, m, x + h) - cyl_eval(kind, m, x - h)) / (2.0 * h)
    assert cyl_deriv(kind, m, x) == pytest.approx(fd, rel=1e-6)


def test_domain_errors():
    with pytest.raises(DomainError):
        cyl_eval(CylKind.MOD_BESSEL_K, 1, 0.0)
    with pytest.raises(DomainError):
        cyl_eval(CylKind.HANKEL1, 1, -2.0)
    with pytest.raises(DomainError):
        cyl_eval(CylKind.BESSEL_J, -1, 1.0)
    with pytest.raises(DomainError):
        cyl_eval(CylKind.BESSEL_J, 1.5, 1.0)


def test_k_overflow_signaled():
    with pytest.raises(OverflowError):
        cyl_eval(CylKind.MOD_BESSEL_K, 200, 1e-3)
