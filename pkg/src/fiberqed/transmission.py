"""Steady state of the weakly driven chain and the transmission spectrum.

Single-excitation, low-saturation regime: the amplitude vector c obeys
0 = i(Delta + i Gamma/2 - H^eff) c + i eta with drive eta_alpha =
Omega e^{i beta z_alpha} and H^eff carrying the off-diagonal couplings
-V - i Gamma/2.  The transmitted guided field past the chain is the
probe plus the forward-scattered amplitudes; everything is expressed in
units of the vacuum decay rate gamma.
"""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["DriveSpec", "SpectrumResult", "steady_state",
           "transmission_spectrum"]


def _default_detunings():
    return np.linspace(-15.0, 15.0, 400)


@dataclass
class DriveSpec:
    """Weak guided probe: Rabi frequency and detuning grid (gamma units).

    The drive is taken real positive; propagation phases e^{i beta z}
    are carried explicitly.  The weak-drive (linear) regime is assumed
    throughout and not enforced.
    """

    rabi: float = 1.0
    detunings: np.ndarray = field(default_factory=_default_detunings)

    def __post_init__(self):
        if self.rabi <= 0.0:
            raise DomainError("Rabi frequency must be positive")
        self.detunings = np.atleast_1d(np.asarray(self.detunings, dtype=float))


@dataclass
class SpectrumResult:
    """Transmission spectrum with full solver provenance."""

    detunings: np.ndarray
    transmission: np.ndarray
    amplitudes: np.ndarray = None  # (n_delta, N) if retained
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.detunings = np.asarray(self.detunings, dtype=float)
        self.transmission = np.asarray(self.transmission, dtype=float)
        if np.any(self.transmission < 0.0):
            raise DomainError("transmission must be non-negative")

    def to_csv(self):
        """RFC-4180 CSV: delta_over_gamma, T, provenance."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["delta_over_gamma", "T", "provenance"])
        prov = self.meta.get("provenance", "")
        for d, t in zip(self.detunings, self.transmission):
            writer.writerow([repr(float(d)), repr(float(t)), prov])
        return buf.getvalue()

    def to_json(self):
        return json.dumps({
            "detunings": [float(x) for x in self.detunings],
            "transmission": [float(x) for x in self.transmission],
            "meta": self.meta,
        }, sort_keys=True, indent=2)


def _effective_matrix(matrices, delta):
    """A = (Delta + i Gamma/2 - H^eff): diagonal Delta + i Gamma_aa/2,
    off-diagonal V_ab + i Gamma_ab/2."""
    v = matrices.V
    g = matrices.Gamma
    n = v.shape[0]
    a = v + 0.5j * g
    a[np.arange(n), np.arange(n)] = delta + 0.5j * np.diag(g)
    return a


def _drive_vector(drive, beta, z):
    return drive.rabi * np.exp(1j * beta * np.asarray(z))


def steady_state(matrices, drive, delta, beta, z_positions):
    """Amplitudes c = -(Delta + i Gamma/2 - H^eff)^{-1} eta at one Delta.

    delta in gamma units; beta is the guided propagation constant at
    the transition frequency.  The solve is dense with partial pivoting
    and the residual is checked against 1e-12 * ||eta||.
    """
    n = matrices.V.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    a = _effective_matrix(matrices, delta)
    eta = _drive_vector(drive, beta, z_positions)
    try:
        c = np.linalg.solve(a, -eta)
    except np.linalg.LinAlgError as exc:
        raise DomainError(
            f"steady state singular at Delta = {delta} gamma "
            "(dark-state degeneracy)") from exc
    residual = float(np.linalg.norm(a @ c + eta))
    bound = 1e-12 * float(np.linalg.norm(eta))
    if residual > bound:
        raise DomainError(
            f"steady-state residual {residual:.3e} exceeds {bound:.3e} "
            f"at Delta = {delta} gamma (near-singular system)")
    return c


def transmission_amplitude(matrices, drive, delta, beta, z_positions,
                           gamma_gd):
    """Complex transmitted field over the bare probe at one detuning.

    gamma_gd: per-emitter guided decay rates (gamma units).  Observed
    beyond the chain; the common propagation phase e^{i beta z_obs} is
    global and drops under |.|^2, so T is z-independent.
    """
    c = steady_state(matrices, drive, delta, beta, z_positions)
    z = np.asarray(z_positions)
    g = np.broadcast_to(np.asarray(gamma_gd, dtype=float), z.shape)
    scattered = np.sum(0.5j * g * np.exp(-1j * beta * z) * c)
    return (drive.rabi + scattered) / drive.rabi


def transmission_spectrum(matrices, drive, ensemble, disp,
                          keep_amplitudes=False):
    """T(Delta) for guided probe light crossing the emitter chain.

    disp supplies the propagation constant beta at the transition
    frequency; the per-emitter guided decay rates come from the guided
    dissipation matrix diagonal.
    """
    from .green_fiber import gamma_guided  # local import: avoid cycle

    z = [p[2] for p in ensemble.positions]
    n = len(z)
    if n:
        gamma_gd = np.diag(gamma_guided(ensemble, disp)).real
    else:
        gamma_gd = np.zeros(0)
    t_vals = np.empty(drive.detunings.size)
    amps = np.empty((drive.detunings.size, n), dtype=complex) \
        if keep_amplitudes else None
    for i, delta in enumerate(drive.detunings):
        if n == 0:
            t_vals[i] = 1.0
            continue
        c = steady_state(matrices, drive, delta, disp.beta, z)
        if keep_amplitudes:
            amps[i] = c
        scattered = np.sum(0.5j * gamma_gd * np.exp(-1j * disp.beta
                                                    * np.asarray(z)) * c)
        t_vals[i] = abs((drive.rabi + scattered) / drive.rabi) ** 2
    meta = dict(matrices.solver_meta)
    meta.update({"provenance": matrices.provenance.value,
                 "rabi": drive.rabi, "n_emitters": n})
    return SpectrumResult(detunings=drive.detunings, transmission=t_vals,
                          amplitudes=amps, meta=meta)
