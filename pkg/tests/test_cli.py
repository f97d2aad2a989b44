import csv
import json
import subprocess

import numpy as np
import pytest

from hemipwi import cli, io


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_render_writes_outputs_and_reruns_bit_identically(tmp_path, capsys):
    a = tmp_path / "a"
    code, _, _ = run(capsys, "render", "--alpha", 57, "--beta", 57, "--iters", 300,
                     "--grid", 48, "--out", a)
    assert code == 0
    doc = io.read_sidecar(f"{a}.json")
    assert doc["command"] == "render" and doc["config"]["alpha"] == 57
    code, _, _ = run(capsys, "rerun", f"{a}.json", "--out", tmp_path / "b")
    assert code == 0
    for ext in (".ppm", ".grid"):
        assert (tmp_path / f"a{ext}").read_bytes() == (tmp_path / f"b{ext}").read_bytes()


def test_identity_render_is_white_but_a_ring(tmp_path, capsys):
    run(capsys, "render", "--alpha", 0, "--beta", 0, "--eps", 0.02, "--iters", 10, "--grid", 64,
        "--out", tmp_path / "r")
    img = io.read_ppm(tmp_path / "r.ppm")
    lit = np.any(img < 255, axis=-1)
    yy, xx = np.nonzero(lit)
    c = 31.5
    radius = np.hypot(yy - c, xx - c) / 32
    assert lit.any() and radius.min() > 0.9


def test_returnplot_and_rerun(tmp_path, capsys):
    code, _, _ = run(capsys, "returnplot", "--alpha", 45, "--beta", 45, "--bins", 20,
                     "--seeds-per-bin", 2, "--iters", 200, "--out", tmp_path / "h")
    assert code == 0
    doc = io.read_sidecar(tmp_path / "h.json")
    assert doc["results"]["T"] == 20 and doc["config"]["seeds_per_bin"] == 2
    counts = io.read_histogram_csv(tmp_path / "h.csv", 20)
    assert counts.sum(axis=1).min() >= 2
    run(capsys, "rerun", tmp_path / "h.json", "--out", tmp_path / "g")
    assert (tmp_path / "h.csv").read_bytes() == (tmp_path / "g.csv").read_bytes()
    assert (tmp_path / "h.ppm").read_bytes() == (tmp_path / "g.ppm").read_bytes()


def test_mix(tmp_path, capsys):
    code, _, _ = run(capsys, "mix", "--alpha", 45, "--beta", 45, "--iters", 5, "--grid", 32,
                     "--pattern", "0.5 + 0.5 * np.sin(3 * phi)", "--out", tmp_path / "m")
    assert code == 0 and io.read_ppm(tmp_path / "m.ppm").shape == (32, 32, 3)


def test_coverage_prints_json(tmp_path, capsys):
    code, out, _ = run(capsys, "coverage", "--alpha", 57, "--beta", 32.75, "--iters", 500,
                       "--grid", 64, "--seeds", 100, "--out", tmp_path / "c")
    assert code == 0
    res = json.loads(out)
    assert set(res) >= {"phi_direct", "phi_density", "abs_diff"}
    assert io.read_sidecar(tmp_path / "c.json")["results"] == res


def test_sweep_coarse_five_gives_25_rows(tmp_path, capsys):
    code, _, _ = run(capsys, "sweep", "--coarse", 5, "--iters", 100, "--grid", 64,
                     "--seeds", 100, "--out", tmp_path / "s")
    assert code == 0
    with open(tmp_path / "s.csv") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 25
    assert list(rows[0]) == ["alpha_deg", "beta_deg", "phi_direct", "phi_density", "abs_diff",
                             "substituted_seeds", "wall_ms"]


@pytest.mark.parametrize("argv", [
    ["render", "--alpha", "200", "--beta", "0"],
    ["coverage", "--alpha", "45", "--beta", "45", "--eps", "-1"],
    ["returnplot", "--alpha", "45", "--beta", "45", "--bins", "7"],
    ["sweep", "--alphas", "190", "--betas", "45"],
    ["mix", "--alpha", "45", "--beta", "45", "--pattern", "__import__('os')"],
])
def test_invalid_config_exits_2_with_json(tmp_path, capsys, argv):
    code, _, err = run(capsys, *argv, "--out", tmp_path / "x")
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["error"] == "invalid_config"


def test_unwritable_output_exits_3(tmp_path, capsys):
    code, _, err = run(capsys, "render", "--alpha", 45, "--beta", 45, "--iters", 1, "--grid", 8,
                       "--out", tmp_path / "missing" / "x")
    assert code == 3 and json.loads(err)["error"] == "io_error"


def test_oracle_check_exit_codes(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle-check", "--phi-rat", 1, 3, "--iters", 3000,
                       "--out", tmp_path / "o")
    assert code == 0 and out.count("PASS") == 4
    code, out, _ = run(capsys, "oracle-check", "--phi-rad", 0.7, "--out", tmp_path / "p")
    assert code == 0 and "FAIL" not in out
    # far too few steps for the orbits to spread around their circles
    code, out, _ = run(capsys, "oracle-check", "--phi-rad", 0.7, "--iters", 50,
                       "--out", tmp_path / "q")
    assert code == 1 and "FAIL" in out


def test_console_script(tmp_path):
    r = subprocess.run(["hemipwi", "coverage", "--alpha", "45", "--beta", "45", "--method",
                        "density", "--iters", "100", "--seeds", "100", "--out",
                        str(tmp_path / "k")], capture_output=True, text=True)
    assert r.returncode == 0 and "phi_density" in json.loads(r.stdout)
