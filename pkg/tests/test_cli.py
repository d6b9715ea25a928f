import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from shintani import cache as io_
from shintani.enumeration import enumerate_table


def run_cli(*args, env_cache=None, check=None):
    env = dict(os.environ)
    if env_cache is not None:
        env[io_.ENV_CACHE_DIR] = str(env_cache)
    p = subprocess.run([sys.executable, "-m", "shintani", *args], capture_output=True, text=True, env=env)
    if check is not None:
        assert p.returncode == check, p.stderr
    return p


def test_residues_command():
    p = run_cli("residues", "--gamma", "1.0", check=0)
    rep = json.loads(p.stdout)
    assert rep["command"] == "residues" and rep["config"]["gamma"] == 1.0
    assert len(rep["results"]) == 8
    assert {(r["family"], r["pole"]) for r in rep["results"]} == {
        (f, q) for f in ("L-", "L+") for q in ("(5+z)/4", "(5-z)/4", "(11+z)/12", "(11-z)/12")}
    assert len(rep["content_hash"]) == 64


def test_shape_command():
    rep = json.loads(run_cli("shape", "--form", "1,1,-2,-1", check=0).stdout)
    assert rep["results"]["shape_x"] == pytest.approx(-0.5, abs=1e-6)
    assert rep["results"]["shape_y"] == pytest.approx(math.sqrt(3) / 2, abs=1e-6)


def test_eis_command():
    rep = json.loads(run_cli("eis", "--gamma", "1", "--tau", "0,1", check=0).stdout)
    assert rep["results"]["tail_bound"] <= 1e-10 and rep["results"]["terms_used"] >= 1


def test_verify_command():
    rep = json.loads(run_cli("verify", "--suite", "eigenvalue", check=0).stdout)
    assert all(r["passed"] for r in rep["results"]) and len(rep["results"]) == 3


@pytest.mark.parametrize("args", [
    ("shape", "--form", "1,2,3"),
    ("shape", "--form", "0,0,1,0"),
    ("eis", "--gamma", "1", "--tau", "0,-1"),
    ("eis", "--gamma", "0", "--tau", "0,1"),
    ("residues", "--gamma", "0"),
    ("verify", "--suite", "nosuch"),
    ("enumerate", "--sign", "pos"),
    ("weyl", "--gamma", "1", "--sign", "neg", "--max-disc", "100", "--grid", "geometric:10:1000:30", "--out", "x.csv"),
])
def test_usage_errors_exit_2(args):
    assert run_cli(*args).returncode == 2


def test_enumerate_is_reproducible_and_extends_by_prefix(tmp_path):
    d = tmp_path / "c"
    p1 = run_cli("enumerate", "--sign", "neg", "--max-disc", "1000", "--cache-dir", str(d), check=0)
    small = (d / "classes-neg.csv").read_bytes()
    (d / "classes-neg.csv").unlink()
    p2 = run_cli("enumerate", "--sign", "neg", "--max-disc", "1000", "--cache-dir", str(d), check=0)
    assert (d / "classes-neg.csv").read_bytes() == small
    assert json.loads(p1.stdout)["results"]["file_sha256"] == json.loads(p2.stdout)["results"]["file_sha256"]
    run_cli("enumerate", "--sign", "neg", "--max-disc", "10000", "--cache-dir", str(d), check=0)
    big = (d / "classes-neg.csv").read_bytes()
    small_rows = small.split(b"\n", 3)[3]
    big_rows = big.split(b"\n", 3)[3]
    assert big_rows.startswith(small_rows)


def test_enumerate_oracle_diff_empty(tmp_path):
    rep = json.loads(run_cli("enumerate", "--sign", "pos", "--max-disc", "2000", "--cache-dir",
                             str(tmp_path), "--oracle", check=0).stdout)
    o = rep["results"]["oracle"]
    assert o["problems"] == [] and o["missing"] == 0 and o["enumerated"] == o["oracle"]


def test_cache_directory_from_environment(tmp_path):
    run_cli("enumerate", "--sign", "pos", "--max-disc", "300", env_cache=tmp_path, check=0)
    assert (tmp_path / "classes-pos.csv").exists()


def test_cache_round_trip_and_integrity(tmp_path):
    t = enumerate_table(1, 500)
    path = tmp_path / "classes-pos.csv"
    digest = io_.write_table(t, path)
    text = path.read_text()
    assert text == io_.dumps_table(t) and f"sha256={digest}" in text
    back, shapes, head = io_.read_table(path)
    assert np.array_equal(back.reps, t.reps) and np.array_equal(back.stab, t.stab)
    assert io_.dumps_table(back) == text
    assert head["max_disc"] == 500 and np.all(shapes.imag > 0)
    lines = text.split("\n")
    lines[5] = lines[5].replace(",1,", ",2,", 1) if ",1," in lines[5] else lines[5] + "0"
    path.write_text("\n".join(lines))
    with pytest.raises(io_.CacheError):
        io_.read_table(path)
    p = run_cli("weyl", "--gamma", "1", "--sign", "pos", "--max-disc", "400", "--grid", "geometric:1:400:25",
                "--out", str(tmp_path / "w.csv"), "--cache-dir", str(tmp_path))
    assert p.returncode == 1 and "hash" in p.stderr


def test_missing_cache_without_build(tmp_path):
    p = run_cli("weyl", "--gamma", "1", "--sign", "neg", "--max-disc", "400", "--grid", "geometric:1:400:25",
                "--out", str(tmp_path / "w.csv"), "--cache-dir", str(tmp_path), "--no-build")
    assert p.returncode == 1


def test_weyl_and_fit(tmp_path):
    out = tmp_path / "w.csv"
    args = ("weyl", "--gamma", "1", "--sign", "neg", "--max-disc", "20000", "--grid", "geometric:100:20000:30",
            "--out", str(out), "--cache-dir", str(tmp_path))
    run_cli(*args, check=0)
    first = out.read_bytes()
    run_cli(*args, check=0)
    assert out.read_bytes() == first
    X, S = io_.loads_weyl(out.read_text())
    assert X.size == 30 and X[-1] == 20000 and np.all(np.isfinite(S))
    rep = json.loads(run_cli("fit", "--in", str(out), "--gamma", "1", "--family", "L-", check=0).stdout)
    r = rep["results"]
    assert set(r) >= {"model_poles", "amplitudes", "residual", "free_slope"}
    assert len(r["amplitudes"]) == 4
