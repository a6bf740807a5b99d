"""Benchmark the radiation dyad: pure-python vs compiled backend.

Times radiation_dyad (the hot loop behind every spectral-table sample)
at a few representative frequencies and checks that the two backends
agree to near machine precision.

Run:  python3 bench/bench_kernel.py
"""

import time

import numpy as np

from fiberqed.constants import C_LIGHT
from fiberqed.dispersion import FiberSpec
from fiberqed.green_fiber import RadiationQuadratureSpec, _gauss_open
from fiberqed.kernel import available_backends, get_kernel

OMEGA_A = 2.0 * np.pi * C_LIGHT / 852e-9
R_F = 250e-9
R_A = R_F + 100e-9
DZ = 852e-9  # one wavelength of axial separation


def bench_one(kernel, omega, fiber, quad, repeats=3):
    k = omega / C_LIGHT
    n1 = fiber.index_clamped(omega)
    m_cut = quad.resolved_m_cut(k, R_A)
    n_theta = quad.resolved_theta_order(k, R_A, R_A, DZ)
    nodes, weights = _gauss_open(n_theta)
    best = np.inf
    dyad = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        dyad = kernel(k, complex(n1), R_F, R_A, 0.0, DZ, R_A, 0.0, 0.0,
                      m_cut, nodes, weights)
        best = min(best, time.perf_counter() - t0)
    return best, dyad, m_cut, n_theta


def main():
    backends = available_backends()
    fiber = FiberSpec(r_f=R_F)
    quad = RadiationQuadratureSpec()
    print(f"backends available: {backends}")
    for mult in (1.0, 5.0, 20.0, 50.0):
        omega = mult * OMEGA_A
        results = {}
        for name in backends:
            dt, dyad, m_cut, n_theta = bench_one(get_kernel(name), omega,
                                                 fiber, quad)
            results[name] = (dt, dyad)
            print(f"omega = {mult:5.1f} w_a  m_cut={m_cut:4d} "
                  f"n_theta={n_theta:5d}  {name:7s} {dt * 1e3:9.2f} ms")
        if len(results) == 2:
            dp = results["python"][1]
            dc = results["cython"][1]
            scale = max(float(np.max(np.abs(dp))), 1e-300)
            dev = float(np.max(np.abs(dp - dc))) / scale
            speedup = results["python"][0] / results["cython"][0]
            print(f"{'':37s}speedup {speedup:5.2f}x  "
                  f"max rel dev {dev:.3e}")
    print()


if __name__ == "__main__":
    main()
