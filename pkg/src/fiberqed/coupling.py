"""Assembly of the N x N dipole-dipole (V) and dissipation (Gamma) matrices.

Every entry splits into a guided and a radiation contribution.  Gamma is
always assembled exactly; for V the radiation part is selectable: the
exact fiber result, the vacuum tensor in its place (the approximation
whose breakdown the transmission comparison exposes), or nothing at all
(guided-only toy model).  All entries are in units of the vacuum decay
rate gamma.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT
from .dispersion import FiberDispersion
from .errors import DomainError, NoGuidedModeError
from .green_fiber import (RadiationQuadratureSpec, cyl_to_cart, gamma_guided,
                          gamma_radiation, v_guided)
from .green_vacuum import v0_gamma0
from .kernel import BACKEND
from . import pv as pv_mod

__all__ = [
    "Provenance",
    "EmitterEnsemble",
    "CouplingMatrices",
    "chain_positions",
    "chain_ensemble",
    "assemble",
]

_HERM_TOL = 1e-10
_PSD_FLOOR = -1e-8

ORIENTATIONS = {
    "parallel": np.array([0.0, 0.0, 1.0]),  # along the fiber axis
    "binormal": np.array([0.0, 1.0, 0.0]),  # tangential, in the surface
    "normal": np.array([1.0, 0.0, 0.0]),    # radial, away from the surface
}


class Provenance(str, enum.Enum):
    """How the radiation part of V was treated."""

    GUIDED_ONLY = "GuidedOnly"
    FULL_EXACT = "FullExact"
    RADIATION_VACUUM_APPROX = "RadiationVacuumApprox"


@dataclass
class EmitterEnsemble:
    """Emitters at cylindrical positions (r, phi, z) with unit dipoles."""

    positions: list
    dipoles: np.ndarray
    omega_a: float
    gamma: float = 1.0

    def __post_init__(self):
        self.positions = [tuple(float(x) for x in p) for p in self.positions]
        self.dipoles = np.asarray(self.dipoles, dtype=complex)
        n = len(self.positions)
        if self.dipoles.shape != (n, 3):
            raise DomainError(
                f"need one Cartesian dipole per emitter: expected shape "
                f"({n}, 3), got {self.dipoles.shape}")
        norms = np.linalg.norm(self.dipoles, axis=1)
        if n and np.max(np.abs(norms - 1.0)) > 1e-12:
            raise DomainError("dipole vectors must be unit-norm within 1e-12")
        if self.omega_a <= 0.0:
            raise DomainError("omega_a must be positive")

    def __len__(self):
        return len(self.positions)


def chain_positions(n, a, x_a, r_f):
    """Periodic chain along the fiber axis: (x_a + r_f, 0, (alpha-1) a)."""
    if n < 0:
        raise DomainError("chain length must be non-negative")
    if n > 1 and a <= 0.0:
        raise DomainError("lattice constant must be positive")
    if x_a <= 0.0:
        raise DomainError("surface distance x_a must be positive")
    r = r_f + x_a
    return [(r, 0.0, alpha * a) for alpha in range(n)]


def chain_ensemble(n, a, x_a, orientation, r_f, omega_a):
    """EmitterEnsemble for the standard chain geometry."""
    try:
        dip = ORIENTATIONS[orientation]
    except KeyError:
        raise DomainError(
            f"unknown orientation {orientation!r}; "
            f"choose from {sorted(ORIENTATIONS)}") from None
    return EmitterEnsemble(
        positions=chain_positions(n, a, x_a, r_f),
        dipoles=np.tile(dip, (n, 1)),
        omega_a=omega_a,
    )


@dataclass
class CouplingMatrices:
    """V and Gamma in gamma units, with provenance and solver settings."""

    V: np.ndarray
    Gamma: np.ndarray
    provenance: Provenance
    solver_meta: dict = field(default_factory=dict)

    def validate(self):
        n = self.V.shape[0]
        if self.V.shape != (n, n) or self.Gamma.shape != (n, n):
            raise DomainError("V and Gamma must be square and same-sized")
        for name, mat in (("V", self.V), ("Gamma", self.Gamma)):
            scale = max(float(np.max(np.abs(mat))) if n else 0.0, 1.0)
            dev = float(np.max(np.abs(mat - mat.conj().T))) if n else 0.0
            if dev > _HERM_TOL * scale:
                raise DomainError(
                    f"{name} not hermitian: deviation {dev:.3e} "
                    f"(scale {scale:.3e})")
        if n and float(np.max(np.abs(np.diag(self.V)))) != 0.0:
            raise DomainError("diag(V) must be exactly zero")
        if n:
            eigmin = float(np.min(np.linalg.eigvalsh(
                0.5 * (self.Gamma + self.Gamma.conj().T))))
            if eigmin < _PSD_FLOOR:
                raise DomainError(
                    f"Gamma not positive semidefinite: lowest eigenvalue "
                    f"{eigmin:.3e} below floor {_PSD_FLOOR:.0e}")
        return self


def _pair_groups(ensemble):
    """Group upper-triangle pairs by batchable geometry.

    Pairs sharing (r_a, phi_a, r_b, phi_b, dipole pair) differ only in
    dz, so one theta-resolved kernel per frequency serves the whole
    group; within a group, pairs at equal |dz| with identical dipoles
    share a single PV evaluation (periodic chains collapse from O(N^2)
    to O(N) distinct separations).
    """
    groups = {}
    n = len(ensemble)
    for a in range(n):
        for b in range(a + 1, n):
            ra, pa, za = ensemble.positions[a]
            rb, pb, zb = ensemble.positions[b]
            da = ensemble.dipoles[a]
            db = ensemble.dipoles[b]
            dip_key = (da.tobytes(), db.tobytes())
            same_dip = bool(np.array_equal(da, db)
                            and np.all(da.imag == 0.0))
            dz = za - zb
            # identical real dipoles on the same azimuthal ray: V is
            # symmetric under z-reflection, so only |dz| matters
            dz_key = abs(dz) if same_dip else dz
            # snap to 12 significant digits so separations equal up to
            # float rounding (z = alpha * a accumulates ulps) share one
            # evaluation
            dz_key = float(f"{dz_key:.12e}")
            gkey = (ra, pa, rb, pb, dip_key)
            groups.setdefault(gkey, {}).setdefault(dz_key, []).append(
                (a, b, dz))
    return groups


def _v_rd_entries(ensemble, fiber, quad, strategy, cache):
    """Exact radiation shifts for all pairs, batched per geometry group."""
    n = len(ensemble)
    out = np.zeros((n, n), dtype=complex)
    for (ra, pa, rb, pb, _), dz_map in _pair_groups(ensemble).items():
        dz_keys = sorted(dz_map, key=abs)
        # one representative pair per distinct separation
        reps = [dz_map[kz][0] for kz in dz_keys]
        a0, b0, _ = reps[0]
        dip_a = ensemble.dipoles[a0]
        dip_b = ensemble.dipoles[b0]
        seps = []
        strategies = []
        for a, b, _ in reps:
            ca = cyl_to_cart(ensemble.positions[a])
            cb = cyl_to_cart(ensemble.positions[b])
            sep = float(np.linalg.norm(ca - cb))
            strat = strategy or pv_mod.default_strategy(ensemble.omega_a, sep)
            seps.append(sep)
            strategies.append(strat)
        omega_max = max(
            s.omega_c if isinstance(s, pv_mod.DirectCutoff) else s.omega_max_c
            for s in strategies)
        pos_a = (ra, pa, 0.0)
        # partner z chosen so z_a - z_b reproduces each pair's dz
        pos_b_list = [(rb, pb, -dz) for (_, _, dz) in reps]
        tables = pv_mod.build_radiation_tables(
            fiber, pos_a, pos_b_list, dip_a, dip_b, ensemble.omega_a,
            omega_max, quad=quad, cache=cache)
        for i, kz in enumerate(dz_keys):
            a, b, _ = reps[i]
            ca = cyl_to_cart(ensemble.positions[a])
            cb = cyl_to_cart(ensemble.positions[b])
            val = pv_mod.v_pair_from_table(
                tables[i], ca, cb, dip_a, dip_b, ensemble.omega_a,
                strategies[i])
            for a2, b2, _ in dz_map[kz]:
                out[a2, b2] = val
                out[b2, a2] = np.conj(val)
    return out


def _v0_entries(ensemble):
    """Vacuum shifts V0 for all pairs (the vacuum-approximation mode).

    Grouped like the exact path so pairs at the same relative geometry
    share one evaluation bit-identically.
    """
    n = len(ensemble)
    out = np.zeros((n, n), dtype=complex)
    for (ra, pa, rb, pb, _), dz_map in _pair_groups(ensemble).items():
        for kz, pairs in dz_map.items():
            a0, b0, dz = pairs[0]
            v0, _ = v0_gamma0(
                ensemble.dipoles[a0], ensemble.dipoles[b0],
                cyl_to_cart((ra, pa, 0.0)), cyl_to_cart((rb, pb, -dz)),
                ensemble.omega_a)
            for a, b, _ in pairs:
                out[a, b] = v0
                out[b, a] = np.conj(v0)
    return out


def _strategy_meta(strategy):
    if strategy is None:
        return {"type": "FourierAveraged", "window": "auto [2,10] lam_a/sep"}
    if isinstance(strategy, pv_mod.DirectCutoff):
        return {"type": "DirectCutoff", "omega_c": strategy.omega_c}
    return {"type": "FourierAveraged",
            "omega_min_c": strategy.omega_min_c,
            "omega_max_c": strategy.omega_max_c,
            "n_cutoffs": strategy.n_cutoffs}


def assemble(ensemble, fiber, mode=Provenance.FULL_EXACT, quad=None,
             strategy=None, cache=None, dispersion=None):
    """Full V and Gamma for the ensemble.

    mode selects the radiation part of V: FullExact (fiber radiation
    modes), RadiationVacuumApprox (vacuum tensor in its place), or
    GuidedOnly.  Gamma = Gamma^gd + Gamma^rd in every mode.
    """
    mode = Provenance(mode)
    quad = quad or RadiationQuadratureSpec()
    for pos in ensemble.positions:
        if pos[0] <= fiber.r_f:
            raise DomainError(
                f"emitter at r = {pos[0]} is not outside the fiber "
                f"(r_f = {fiber.r_f})")
    solver = dispersion or FiberDispersion(fiber)
    try:
        disp = solver.solve_beta(ensemble.omega_a)
    except NoGuidedModeError:
        # index-matched (vacuum) fiber: no bound mode, guided parts vanish
        disp = None

    n = len(ensemble)
    if disp is None:
        gamma = np.zeros((n, n), dtype=complex)
        v = np.zeros((n, n), dtype=complex)
    else:
        gamma = gamma_guided(ensemble, disp)
        v = v_guided(ensemble, disp)
    gamma = gamma + gamma_radiation(ensemble, fiber, quad)
    if mode is Provenance.FULL_EXACT:
        v = v + _v_rd_entries(ensemble, fiber, quad, strategy, cache)
    elif mode is Provenance.RADIATION_VACUUM_APPROX:
        v = v + _v0_entries(ensemble)
    np.fill_diagonal(v, 0.0)

    meta = {
        "provenance": mode.value,
        "kernel_backend": BACKEND,
        "omega_a": ensemble.omega_a,
        "beta_a": disp.beta if disp is not None else None,
        "beta_prime_c": disp.beta_prime * C_LIGHT
        if disp is not None else None,
        "quad": {"m_cut": quad.m_cut, "theta_order": quad.theta_order,
                 "rel_tol": quad.rel_tol},
        "pv_strategy": _strategy_meta(strategy),
    }
    return CouplingMatrices(V=v, Gamma=gamma, provenance=mode,
                            solver_meta=meta).validate()
