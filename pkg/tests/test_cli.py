import json
import os

import pytest

from fiberqed.cli import main

BASE = """\
schema = 1
lambda_a_nm = 852.0

[fiber]
r_f_nm = 250.0
material = "silica"
"""

DISPERSION = BASE + """
[dispersion]
lambda_min_nm = 800.0
lambda_max_nm = 900.0
n_points = 3
"""

SPECTRUM = BASE + """
[chain]
n = 1
a_over_lambda = 0.3
x_a_nm = 100.0
orientation = "normal"

[drive]
rabi = 1e-3
detuning_min = -5.0
detuning_max = 5.0
n_detunings = 11
"""

PAIR = BASE + """
[pair_sweep]
a_over_lambda_min = 2.0
a_over_lambda_max = 2.0
n_points = 1
x_a_nm = 100.0
orientations = ["normal"]
"""

GREEN = BASE + """
[green_map]
component = "zz"
plane = "yx"
field = "vacuum"
extent_lambda = 0.6
n_grid = 5
source_x_a_nm = 100.0
"""


def _write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_unknown_key_exits_2(tmp_path, capsys):
    cfg = _write(tmp_path, "mystery = 1\n" + BASE)
    assert main(["dispersion", "--config", cfg,
                 "--output", str(tmp_path)]) == 2
    assert "unknown config keys" in capsys.readouterr().err
    cfg2 = _write(tmp_path, BASE + "typo_in_section = 1\n", "run2.toml")
    assert main(["dispersion", "--config", cfg2,
                 "--output", str(tmp_path)]) == 2
    assert "unknown keys in [fiber]" in capsys.readouterr().err


def test_missing_schema_exits_2(tmp_path):
    cfg = _write(tmp_path, "lambda_a_nm = 852.0\n")
    assert main(["dispersion", "--config", cfg,
                 "--output", str(tmp_path)]) == 2


def test_bad_toml_exits_2(tmp_path):
    cfg = _write(tmp_path, "schema = [broken\n")
    assert main(["dispersion", "--config", cfg,
                 "--output", str(tmp_path)]) == 2


def test_missing_config_file_exits_2(tmp_path):
    assert main(["dispersion", "--config", str(tmp_path / "nope.toml"),
                 "--output", str(tmp_path)]) == 2


def test_threads_must_be_positive(tmp_path):
    cfg = _write(tmp_path, DISPERSION)
    assert main(["dispersion", "--config", cfg, "--output", str(tmp_path),
                 "--threads", "0"]) == 2


def test_vacuum_material_exits_3(tmp_path):
    cfg = _write(tmp_path, DISPERSION.replace('"silica"', '"vacuum"'))
    assert main(["dispersion", "--config", cfg,
                 "--output", str(tmp_path)]) == 3


def test_pair_floor_exits_2(tmp_path):
    cfg = _write(tmp_path, PAIR.replace("a_over_lambda_min = 2.0",
                                        "a_over_lambda_min = 0.01"))
    assert main(["pair-interaction", "--config", cfg,
                 "--output", str(tmp_path)]) == 2


def test_dispersion_output_deterministic(tmp_path):
    cfg = _write(tmp_path, DISPERSION)
    blobs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(["dispersion", "--config", cfg,
                     "--output", str(out)]) == 0
        blobs.append((out / "dispersion.csv").read_bytes()
                     + (out / "dispersion.meta.json").read_bytes())
    assert blobs[0] == blobs[1]
    sidecar = json.loads((tmp_path / "a" / "dispersion.meta.json")
                         .read_text())
    assert sidecar["resolved_config"]["lambda_a_nm"] == 852.0
    assert "solver_meta" in sidecar and "kernel_backend" in sidecar


def test_green_map_masks_fiber_interior(tmp_path):
    cfg = _write(tmp_path, GREEN)
    assert main(["green-map", "--config", cfg,
                 "--output", str(tmp_path)]) == 0
    lines = (tmp_path / "green_map_vacuum_zz_yx.csv").read_text() \
        .splitlines()[1:]
    rows = [line.split(",") for line in lines]
    masked = [r for r in rows if r[2] == "1"]
    clear = [r for r in rows if r[2] == "0"]
    assert masked and clear
    # the grid center sits inside the fiber
    center = [r for r in rows if float(r[0]) == 0.0 and float(r[1]) == 0.0]
    assert center[0][2] == "1"


def test_spectrum_emits_both_provenances(tmp_path):
    cfg = _write(tmp_path, SPECTRUM)
    assert main(["spectrum", "--config", cfg, "--output", str(tmp_path),
                 "--cache", str(tmp_path / "cache"),
                 "--mode", "both"]) == 0
    exact = (tmp_path / "spectrum_exact.csv").read_text()
    vac = (tmp_path / "spectrum_vacuum_approx.csv").read_text()
    assert "FullExact" in exact
    assert "RadiationVacuumApprox" in vac
    raw = (tmp_path / "spectrum_exact.csv").read_bytes()
    assert raw.startswith(b"delta_over_gamma,T,provenance\r\n")
    meta = json.loads((tmp_path / "spectrum_exact.meta.json").read_text())
    assert meta["solver_meta"]["provenance"] == "FullExact"
    assert meta["solver_meta"]["n_emitters"] == 1


def test_green_map_zero_grid_emits_header_only(tmp_path):
    cfg = _write(tmp_path, GREEN.replace("n_grid = 5", "n_grid = 0"))
    assert main(["green-map", "--config", cfg,
                 "--output", str(tmp_path)]) == 0
    text = (tmp_path / "green_map_vacuum_zz_yx.csv").read_text()
    assert text.splitlines() == ["u,v,masked,im_g_zz"]


def test_pair_interaction_cache_roundtrip_and_corruption(tmp_path):
    cfg = _write(tmp_path, PAIR)
    cache = tmp_path / "cache"
    assert main(["pair-interaction", "--config", cfg,
                 "--output", str(tmp_path / "a"),
                 "--cache", str(cache)]) == 0
    # warm rerun must byte-match the cold one
    assert main(["pair-interaction", "--config", cfg,
                 "--output", str(tmp_path / "b"),
                 "--cache", str(cache)]) == 0
    assert (tmp_path / "a" / "pair_interaction.csv").read_bytes() == \
        (tmp_path / "b" / "pair_interaction.csv").read_bytes()
    for name in os.listdir(cache):
        with open(cache / name, "wb") as fh:
            fh.write(b"corrupted")
    assert main(["pair-interaction", "--config", cfg,
                 "--output", str(tmp_path / "c"),
                 "--cache", str(cache)]) == 4
