"""Fiber material dispersion and the HE11 guided-mode propagation constant.

The fiber index follows a three-term Sellmeier model loaded from a TOML
material file; the propagation constant beta(omega) is the single root of
the fiber eigenvalue equation inside the guided bracket
omega/c < beta < n1*omega/c, found by dense-scan bracketing plus Brent
refinement.  beta'(omega) comes from central differences with a
Richardson consistency check.
"""

import importlib.resources
import math
from dataclasses import dataclass, field

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import numpy as np
from scipy import special as sp
from scipy.optimize import brentq

from .constants import C_LIGHT
from .errors import ConfigError, ConvergenceError, DomainError, MultipleModesError, NoGuidedModeError

__all__ = [
    "SellmeierMaterial",
    "FiberSpec",
    "GuidedDispersionPoint",
    "FiberDispersion",
]

_MATERIAL_KEYS = {"B1", "B2", "B3", "L1sq", "L2sq", "L3sq", "valid_range_um", "name"}


@dataclass(frozen=True)
class SellmeierMaterial:
    """Three-term Sellmeier dispersion model; L*sq in um^2."""

    b: tuple
    lsq: tuple
    valid_range_um: tuple
    name: str = "custom"

    @classmethod
    def from_mapping(cls, data, name="custom"):
        unknown = set(data) - _MATERIAL_KEYS
        if unknown:
            raise ConfigError(f"unknown material keys: {sorted(unknown)}")
        try:
            b = (float(data["B1"]), float(data["B2"]), float(data["B3"]))
            lsq = (float(data["L1sq"]), float(data["L2sq"]), float(data["L3sq"]))
            lo, hi = data["valid_range_um"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad material file: {exc}") from exc
        return cls(b=b, lsq=lsq, valid_range_um=(float(lo), float(hi)),
                   name=data.get("name", name))

    @classmethod
    def from_file(cls, path):
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        return cls.from_mapping(data, name=str(path))

    @classmethod
    def silica(cls):
        ref = importlib.resources.files("fiberqed.data") / "silica.toml"
        data = tomllib.loads(ref.read_text())
        return cls.from_mapping(data)

    @classmethod
    def vacuum(cls):
        return cls(b=(0.0, 0.0, 0.0), lsq=(0.0, 0.01, 0.02),
                   valid_range_um=(1e-3, 1e3), name="vacuum")

    def index_at_wavelength_um(self, lam_um):
        lam2 = lam_um * lam_um
        acc = 1.0
        for bi, li in zip(self.b, self.lsq):
            acc += bi * lam2 / (lam2 - li)
        if acc <= 0.0:
            raise DomainError(f"Sellmeier form non-physical at {lam_um} um")
        return math.sqrt(acc)

    def index(self, omega):
        """n(omega); rejects frequencies outside the declared validity band."""
        lam_um = 2.0 * math.pi * C_LIGHT / omega * 1e6
        lo, hi = self.valid_range_um
        if not (lo <= lam_um <= hi):
            raise DomainError(
                f"wavelength {lam_um:.4g} um outside Sellmeier band [{lo}, {hi}] um")
        return self.index_at_wavelength_um(lam_um)

    def index_clamped(self, omega):
        """n(omega) with the wavelength clamped to the validity band.

        Used when integrating over all frequencies: the index is frozen at
        its band-edge value outside the band, avoiding the unphysical
        Sellmeier poles.
        """
        lam_um = 2.0 * math.pi * C_LIGHT / omega * 1e6
        lo, hi = self.valid_range_um
        return self.index_at_wavelength_um(min(max(lam_um, lo), hi))


@dataclass(frozen=True)
class FiberSpec:
    """Cylindrical step-index nanofiber in vacuum (exterior index 1)."""

    r_f: float  # fiber radius [m]
    material: SellmeierMaterial = field(default_factory=SellmeierMaterial.silica)

    def __post_init__(self):
        if self.r_f <= 0.0:
            raise DomainError(f"fiber radius must be positive, got {self.r_f}")

    def index(self, omega):
        return self.material.index(omega)

    def index_clamped(self, omega):
        return self.material.index_clamped(omega)


@dataclass
class GuidedDispersionPoint:
    """HE11 solution at one frequency: beta and derived mode parameters."""

    omega: float
    beta: float
    beta_prime: float
    kappa: float
    q: float
    s: float
    k: float
    n1: float
    r_f: float
    norm_const: float = None  # filled lazily by modes.guided_norm_const


def _eigenvalue_residual(n_eff, k, n1, r_f):
    """Dimensionless HE11 eigenvalue equation, zero at the guided mode."""
    beta = n_eff * k
    kappa = k * math.sqrt(n1 * n1 - n_eff * n_eff)
    q = k * math.sqrt(n_eff * n_eff - 1.0)
    x = kappa * r_f
    y = q * r_f
    j1 = sp.jv(1, x)
    if j1 == 0.0:
        return math.inf
    lhs = sp.jv(0, x) / (x * j1)
    kk = sp.kvp(1, y) / (y * sp.kv(1, y))
    inv_x2 = 1.0 / (x * x)
    inv_y2 = 1.0 / (y * y)
    n1sq = n1 * n1
    rad = ((n1sq - 1.0) / (2.0 * n1sq) * kk) ** 2 \
        + (n_eff * n_eff / n1sq) * (inv_y2 + inv_x2) ** 2
    # HE branch: minus sign on both the K'-term and the square root
    rhs = -(n1sq + 1.0) / (2.0 * n1sq) * kk + inv_x2 - math.sqrt(rad)
    return lhs - rhs


class FiberDispersion:
    """Guided-mode dispersion solver with a per-instance memo cache."""

    BRACKET_EPS = 1e-9

    def __init__(self, fiber: FiberSpec, n_scan: int = 4000):
        self.fiber = fiber
        self.n_scan = n_scan
        self._cache = {}

    def refractive_index(self, omega):
        return self.fiber.index(omega)

    def _solve_root(self, omega, require_single_mode=True):
        n1 = self.fiber.index(omega)
        if n1 <= 1.0:
            raise NoGuidedModeError(
                f"no guided mode: fiber index {n1} does not exceed the exterior index")
        k = omega / C_LIGHT
        r_f = self.fiber.r_f
        lo = 1.0 + self.BRACKET_EPS
        hi = n1 * (1.0 - self.BRACKET_EPS)
        grid = np.linspace(lo, hi, self.n_scan)
        vals = np.array([_eigenvalue_residual(x, k, n1, r_f) for x in grid])
        roots = []
        for i in range(len(grid) - 1):
            a, b = vals[i], vals[i + 1]
            if not (math.isfinite(a) and math.isfinite(b)):
                continue
            if a == 0.0:
                roots.append(grid[i])
            elif a * b < 0.0:
                root = brentq(_eigenvalue_residual, grid[i], grid[i + 1],
                              args=(k, n1, r_f), xtol=1e-15, rtol=8.9e-16)
                # sign changes across poles of the residual are not modes
                if abs(_eigenvalue_residual(root, k, n1, r_f)) < 1e-10:
                    roots.append(root)
        if not roots:
            raise NoGuidedModeError(
                f"no guided-mode root in ({lo}, {hi}) at omega={omega:.6g}")
        if len(roots) > 1 and require_single_mode:
            raise MultipleModesError(
                f"{len(roots)} HE1m roots in the guided bracket at omega={omega:.6g}; "
                "reduce the frequency (or fiber radius) to stay single-mode")
        # the fundamental HE11 is the root with the largest propagation constant
        n_eff = max(roots)
        beta = n_eff * k
        kappa = k * math.sqrt(n1 * n1 - n_eff * n_eff)
        q = k * math.sqrt(n_eff * n_eff - 1.0)
        x = kappa * r_f
        y = q * r_f
        s = (1.0 / x**2 + 1.0 / y**2) / (
            sp.jvp(1, x) / (x * sp.jv(1, x)) + sp.kvp(1, y) / (y * sp.kv(1, y)))
        return beta, kappa, q, s, n1

    def solve_beta(self, omega, require_single_mode=True):
        """HE11 dispersion point at omega (memoized, beta' included).

        With require_single_mode (default) additional HE1m roots in the
        bracket raise MultipleModesError; otherwise the fundamental
        (largest beta) is returned.
        """
        key = (f"{omega:.9e}", require_single_mode)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        beta, kappa, q, s, n1 = self._solve_root(omega, require_single_mode)
        beta_prime = self._beta_prime(omega, require_single_mode=require_single_mode)
        point = GuidedDispersionPoint(
            omega=omega, beta=beta, beta_prime=beta_prime, kappa=kappa, q=q,
            s=s, k=omega / C_LIGHT, n1=n1, r_f=self.fiber.r_f)
        self._cache[key] = point
        return point

    def _beta_at(self, omega, require_single_mode=True):
        return self._solve_root(omega, require_single_mode)[0]

    def _beta_prime(self, omega, h=1e-6, check_tol=1e-6, require_single_mode=True):
        def b(w):
            return self._beta_at(w, require_single_mode)

        d1 = (b(omega * (1 + h)) - b(omega * (1 - h))) / (2 * h * omega)
        h2 = h / 2
        d2 = (b(omega * (1 + h2)) - b(omega * (1 - h2))) / (2 * h2 * omega)
        if abs(d1 - d2) > check_tol * abs(d2):
            raise ConvergenceError(
                f"beta'({omega:.6g}) finite-difference Richardson check failed",
                achieved_tol=abs(d1 - d2) / abs(d2))
        return d2

    def beta_prime(self, omega):
        return self.solve_beta(omega).beta_prime
