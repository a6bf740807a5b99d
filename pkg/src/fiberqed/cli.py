"""Command-line front end.

Subcommands emit CSV tables plus a JSON metadata sidecar per run:

* dispersion       -- guided-mode beta(omega) over a wavelength band
* green-map        -- Im{G} component sampled on a plane around a source
* pair-interaction -- V^rd and V0 versus a/lambda_a (three orientations)
* spectrum         -- transmission T(Delta) for a chain, exact and/or
                      vacuum-approximated radiation shifts

Configs are TOML with a versioned schema; unknown keys are errors, not
warnings -- a silently ignored typo in a physics config wastes hours.
Outputs are deterministic: identical config + cache state produce
byte-identical files.

Exit codes: 0 success, 2 config error, 3 physics/convergence error,
4 cache corruption.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .constants import C_LIGHT
from .coupling import (ORIENTATIONS, Provenance, assemble, chain_ensemble)
from .dispersion import FiberDispersion, FiberSpec, SellmeierMaterial
from .errors import CacheError, ConfigError, FiberQedError
from .green_fiber import (RadiationQuadratureSpec, cyl_to_cart,
                          im_g_radiation)
from .green_vacuum import g0, v0_gamma0
from .kernel import BACKEND
from .pv import (DirectCutoff, FourierAveraged, TableCache, set_worker_cap,
                 v_rd_pair)
from .transmission import DriveSpec, transmission_spectrum

__all__ = ["main"]

SCHEMA_VERSION = 1
A_FLOOR_OVER_LAMBDA = 0.05

# every key the schema knows, per section (None = scalar at top level)
_SCHEMA = {
    None: {"schema", "lambda_a_nm", "fiber", "chain", "quad", "pv",
           "drive", "dispersion", "green_map", "pair_sweep"},
    "fiber": {"r_f_nm", "material"},
    "chain": {"n", "a_over_lambda", "x_a_nm", "orientation"},
    "quad": {"m_cut", "theta_order", "rel_tol"},
    "pv": {"strategy", "n_cutoffs", "omega_min_c", "omega_max_c", "omega_c"},
    "drive": {"rabi", "detuning_min", "detuning_max", "n_detunings"},
    "dispersion": {"lambda_min_nm", "lambda_max_nm", "n_points"},
    "green_map": {"component", "plane", "field", "extent_lambda", "n_grid",
                  "source_x_a_nm", "orientation"},
    "pair_sweep": {"a_over_lambda_min", "a_over_lambda_max", "n_points",
                   "x_a_nm", "orientations"},
}


def _load_config(path):
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}") from exc
    _check_keys(cfg)
    if cfg.get("schema") != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}: schema = {cfg.get('schema')!r}, expected "
            f"{SCHEMA_VERSION}")
    if "lambda_a_nm" not in cfg:
        raise ConfigError(f"{path}: missing required key lambda_a_nm")
    return cfg


def _check_keys(cfg):
    unknown = set(cfg) - _SCHEMA[None]
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for section, allowed in _SCHEMA.items():
        if section is None or section not in cfg:
            continue
        sub = cfg[section]
        if not isinstance(sub, dict):
            raise ConfigError(f"[{section}] must be a table")
        bad = set(sub) - allowed
        if bad:
            raise ConfigError(
                f"unknown keys in [{section}]: {sorted(bad)}")


def _require(cfg, section, keys=()):
    if section not in cfg:
        raise ConfigError(f"missing required config section [{section}]")
    sub = cfg[section]
    missing = [k for k in keys if k not in sub]
    if missing:
        raise ConfigError(f"[{section}] missing keys: {missing}")
    return sub


def _fiber_from(cfg):
    sub = _require(cfg, "fiber", ["r_f_nm"])
    name = sub.get("material", "silica")
    if name == "silica":
        mat = SellmeierMaterial.silica()
    elif name == "vacuum":
        mat = SellmeierMaterial.vacuum()
    else:
        mat = SellmeierMaterial.from_file(name)
    return FiberSpec(r_f=float(sub["r_f_nm"]) * 1e-9, material=mat)


def _quad_from(cfg):
    sub = cfg.get("quad", {})
    return RadiationQuadratureSpec(
        m_cut=sub.get("m_cut"),
        theta_order=sub.get("theta_order"),
        rel_tol=float(sub.get("rel_tol", 1e-3)),
    )


def _strategy_from(cfg, omega_a, override=None):
    """PV strategy, or None for the per-pair automatic window."""
    sub = cfg.get("pv", {})
    kind = override or sub.get("strategy", "averaged")
    if kind == "direct":
        if "omega_c" not in sub:
            raise ConfigError("[pv] strategy 'direct' needs omega_c "
                              "(units of omega_a)")
        return DirectCutoff(float(sub["omega_c"]) * omega_a)
    if kind != "averaged":
        raise ConfigError(f"unknown pv strategy {kind!r}")
    if "omega_min_c" in sub or "omega_max_c" in sub:
        if not ("omega_min_c" in sub and "omega_max_c" in sub):
            raise ConfigError("[pv] omega_min_c and omega_max_c must be "
                              "given together")
        return FourierAveraged(
            float(sub["omega_min_c"]) * omega_a,
            float(sub["omega_max_c"]) * omega_a,
            int(sub.get("n_cutoffs", 32)))
    return None


def _drive_from(cfg):
    sub = cfg.get("drive", {})
    lo = float(sub.get("detuning_min", -15.0))
    hi = float(sub.get("detuning_max", 15.0))
    n = int(sub.get("n_detunings", 400))
    if n < 1 or hi <= lo:
        raise ConfigError("[drive] needs detuning_min < detuning_max and "
                          "n_detunings >= 1")
    return DriveSpec(rabi=float(sub.get("rabi", 1e-3)),
                     detunings=np.linspace(lo, hi, n))


def _omega_a(cfg):
    return 2.0 * math.pi * C_LIGHT / (float(cfg["lambda_a_nm"]) * 1e-9)


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, float) else x
                         for x in row])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def _write_sidecar(path, cfg, meta):
    payload = {"resolved_config": cfg, "solver_meta": meta,
               "kernel_backend": BACKEND, "schema": SCHEMA_VERSION}
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_dispersion(cfg, args):
    sub = _require(cfg, "dispersion",
                   ["lambda_min_nm", "lambda_max_nm", "n_points"])
    fiber = _fiber_from(cfg)
    solver = FiberDispersion(fiber)
    lams = np.linspace(float(sub["lambda_min_nm"]),
                       float(sub["lambda_max_nm"]), int(sub["n_points"]))
    rows = []
    for lam_nm in lams:
        omega = 2.0 * math.pi * C_LIGHT / (lam_nm * 1e-9)
        pt = solver.solve_beta(omega)
        rows.append([float(lam_nm), float(omega), float(pt.beta),
                     float(pt.beta_prime), float(pt.s),
                     float(pt.beta / pt.k)])
    out = os.path.join(args.output, "dispersion.csv")
    _write_csv(out, ["lambda_nm", "omega", "beta", "beta_prime", "s",
                     "n_eff"], rows)
    _write_sidecar(out.replace(".csv", ".meta.json"), cfg,
                   {"r_f": fiber.r_f, "material": fiber.material.name})
    return [out]


def cmd_green_map(cfg, args):
    gm = _require(cfg, "green_map", ["component", "plane", "n_grid"])
    comp = gm["component"]
    plane = gm["plane"]
    if comp not in ("xx", "yy", "zz"):
        raise ConfigError(f"green_map component must be xx/yy/zz, got {comp}")
    if plane not in ("zx", "yx"):
        raise ConfigError(f"green_map plane must be zx or yx, got {plane}")
    field_kind = gm.get("field", "vacuum")
    if field_kind not in ("vacuum", "radiation"):
        raise ConfigError("green_map field must be 'vacuum' or 'radiation'")
    fiber = _fiber_from(cfg)
    omega_a = _omega_a(cfg)
    lam = 2.0 * math.pi * C_LIGHT / omega_a
    quad = _quad_from(cfg)
    n_grid = int(gm["n_grid"])
    extent = float(gm.get("extent_lambda", 2.0)) * lam
    x_src = fiber.r_f + float(gm.get("source_x_a_nm", 100.0)) * 1e-9
    idx = {"xx": 0, "yy": 1, "zz": 2}[comp]

    rows = []
    axis = np.linspace(-extent, extent, n_grid) if n_grid > 0 else []
    src_cyl = (x_src, 0.0, 0.0)
    src_cart = cyl_to_cart(src_cyl)
    for u in axis:
        for v in axis:
            if plane == "zx":
                point = np.array([v, 0.0, u])   # (x, 0, z)
            else:
                point = np.array([v, u, 0.0])   # (x, y, 0)
            r_cyl = math.hypot(point[0], point[1])
            masked = r_cyl <= fiber.r_f or \
                float(np.linalg.norm(point - src_cart)) < 1e-12
            if masked:
                rows.append([float(u), float(v), 1, 0.0])
                continue
            if field_kind == "vacuum":
                dyad = g0(src_cart, point, omega_a)
            else:
                phi = math.atan2(point[1], point[0])
                dyad = im_g_radiation(
                    src_cyl, (r_cyl, phi, float(point[2])), omega_a,
                    fiber, quad)
            val = float(dyad.entries[idx, idx].imag) \
                if field_kind == "vacuum" else \
                float(dyad.entries[idx, idx].real)
            rows.append([float(u), float(v), 0, val])
    out = os.path.join(args.output,
                       f"green_map_{field_kind}_{comp}_{plane}.csv")
    _write_csv(out, ["u", "v", "masked", f"im_g_{comp}"], rows)
    _write_sidecar(out.replace(".csv", ".meta.json"), cfg,
                   {"field": field_kind, "source": list(src_cart)})
    return [out]


def cmd_pair_interaction(cfg, args):
    sw = _require(cfg, "pair_sweep",
                  ["a_over_lambda_min", "a_over_lambda_max", "n_points",
                   "x_a_nm"])
    fiber = _fiber_from(cfg)
    omega_a = _omega_a(cfg)
    lam = 2.0 * math.pi * C_LIGHT / omega_a
    quad = _quad_from(cfg)
    cache = TableCache(args.cache) if args.cache else None
    orientations = sw.get("orientations",
                          ["parallel", "binormal", "normal"])
    for o in orientations:
        if o not in ORIENTATIONS:
            raise ConfigError(f"unknown orientation {o!r}")
    lo = float(sw["a_over_lambda_min"])
    hi = float(sw["a_over_lambda_max"])
    if lo < A_FLOOR_OVER_LAMBDA:
        raise ConfigError(
            f"a/lambda_a = {lo} below the feasibility floor "
            f"{A_FLOOR_OVER_LAMBDA}: the PV table would need a cutoff "
            f"beyond 10/{A_FLOOR_OVER_LAMBDA} omega_a")
    r = fiber.r_f + float(sw["x_a_nm"]) * 1e-9
    aols = np.linspace(lo, hi, int(sw["n_points"]))
    rows = []
    for orientation in orientations:
        dip = ORIENTATIONS[orientation]
        for aol in aols:
            a = aol * lam
            pos_a = (r, 0.0, 0.0)
            pos_b = (r, 0.0, a)
            strategy = _strategy_from(cfg, omega_a, args.strategy)
            vrd = v_rd_pair(pos_a, pos_b, dip, dip, omega_a, fiber,
                            quad=quad, strategy=strategy, cache=cache)
            v0, _ = v0_gamma0(dip, dip, cyl_to_cart(pos_a),
                              cyl_to_cart(pos_b), omega_a)
            rows.append([orientation, float(aol), float(vrd),
                         float(v0.real)])
    out = os.path.join(args.output, "pair_interaction.csv")
    _write_csv(out, ["orientation", "a_over_lambda", "v_rd", "v0"], rows)
    _write_sidecar(out.replace(".csv", ".meta.json"), cfg,
                   {"x_a_nm": sw["x_a_nm"], "r": r,
                    "strategy": args.strategy or "config/auto"})
    return [out]


_MODE_MAP = {
    "exact": [Provenance.FULL_EXACT],
    "vacuum-approx": [Provenance.RADIATION_VACUUM_APPROX],
    "both": [Provenance.FULL_EXACT, Provenance.RADIATION_VACUUM_APPROX],
}

_MODE_FILE = {
    Provenance.FULL_EXACT: "exact",
    Provenance.RADIATION_VACUUM_APPROX: "vacuum_approx",
}


def cmd_spectrum(cfg, args):
    ch = _require(cfg, "chain", ["n", "a_over_lambda", "x_a_nm",
                                 "orientation"])
    fiber = _fiber_from(cfg)
    omega_a = _omega_a(cfg)
    lam = 2.0 * math.pi * C_LIGHT / omega_a
    quad = _quad_from(cfg)
    drive = _drive_from(cfg)
    cache = TableCache(args.cache) if args.cache else None
    ens = chain_ensemble(int(ch["n"]), float(ch["a_over_lambda"]) * lam,
                         float(ch["x_a_nm"]) * 1e-9, ch["orientation"],
                         fiber.r_f, omega_a)
    solver = FiberDispersion(fiber)
    disp = solver.solve_beta(omega_a)
    strategy = _strategy_from(cfg, omega_a, args.strategy)
    outputs = []
    for mode in _MODE_MAP[args.mode]:
        matrices = assemble(ens, fiber, mode, quad=quad, strategy=strategy,
                            cache=cache, dispersion=solver)
        spec = transmission_spectrum(matrices, drive, ens, disp)
        out = os.path.join(args.output,
                           f"spectrum_{_MODE_FILE[mode]}.csv")
        with open(out, "w", newline="") as fh:
            fh.write(spec.to_csv())
        meta = dict(spec.meta)
        meta["chain_convention"] = (
            "emitter alpha at cylindrical (r_f + x_a, 0, (alpha - 1) * a)")
        meta["r"] = fiber.r_f + float(ch["x_a_nm"]) * 1e-9
        _write_sidecar(out.replace(".csv", ".meta.json"), cfg, meta)
        outputs.append(out)
    return outputs


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fiberqed",
        description="Nanofiber-mediated emitter interactions and "
                    "transmission spectra.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in [("dispersion", cmd_dispersion),
                     ("green-map", cmd_green_map),
                     ("pair-interaction", cmd_pair_interaction),
                     ("spectrum", cmd_spectrum)]:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML config file")
        p.add_argument("--output", default=".", help="output directory")
        p.add_argument("--cache", default=None,
                       help="spectral-table cache directory")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap for table sampling")
        p.add_argument("--strategy", choices=["direct", "averaged"],
                       default=None, help="override [pv].strategy")
        p.add_argument("--mode",
                       choices=["exact", "vacuum-approx", "both"],
                       default="both",
                       help="radiation treatment (spectrum command)")
        p.set_defaults(func=fn)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    set_worker_cap(args.threads)
    try:
        os.makedirs(args.output, exist_ok=True)
        cfg = _load_config(args.config)
        outputs = args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CacheError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return 4
    except FiberQedError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return 3
    for path in outputs:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
