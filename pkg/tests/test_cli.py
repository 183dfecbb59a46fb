import json
import os
import shutil
import subprocess
import sys

import pytest

from tdlc.catalogue import entry
from tdlc.cli import main, write_atomic


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_catalogue_listing(capsys):
    code, out, _ = run(["catalogue"], capsys)
    assert code == 0
    assert "E3  s=2 [PAPER]" in out
    assert "E4  s=1" in out
    code, out, _ = run(["catalogue", "--json"], capsys)
    assert len(json.loads(out)) >= 5


def test_scale_certified(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["scale", "E1", "--json", str(out)], capsys)
    assert code == 0
    d = json.loads(out.read_text())
    assert d["scale"] == 3 and d["status"] == "ExactYes"
    assert d["checks"]["pair_agreement"] == [3, 3]


def test_scale_from_config_file(tmp_path, capsys):
    cfg = tmp_path / "m.json"
    cfg.write_text(json.dumps(entry("E3").config.to_dict()))
    code, out, _ = run(["scale", str(cfg), "--json", "-", "--powers", "2"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["scale"] == 2 and d["checks"]["power_law"] == [2, 4]


def test_zero_horizon_is_uncertain(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["scale", "E2", "--horizon", "0", "--json", str(out)], capsys)
    assert code == 2
    assert json.loads(out.read_text())["status"] == "AtHorizonYes"


def test_malformed_config(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"family": "hnn",\n "params": {"A": }}')
    out = tmp_path / "r.json"
    code, _, err = run(["scale", str(cfg), "--json", str(out)], capsys)
    assert code == 1
    assert "line 2" in err
    assert not out.exists()
    assert os.listdir(tmp_path) == ["bad.json"]


def test_unknown_key(capsys):
    code, _, err = run(["scale", "NOPE"], capsys)
    assert code == 1 and "NOPE" in err


def test_tidy_prints_subgroup(capsys):
    code, out, _ = run(["tidy", "E2"], capsys)
    assert code == 0
    assert "index [V : V cap alpha^-1(V)] = 3" in out


def test_graph_dot_has_forty_nodes(tmp_path, capsys):
    out = tmp_path / "g.dot"
    code, _, _ = run(["graph", "E1", "--kind", "gamma+", "--depth", "3", "--format", "dot", "--out", str(out)], capsys)
    assert code == 0
    assert out.read_text().count("[level=") == 40


@pytest.mark.parametrize("kind", ["gamma+", "gamma++", "quotient", "window"])
def test_graph_exports_are_deterministic(kind, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert run(["graph", "E2", "--kind", kind, "--depth", "2", "--format", "json", "--out", str(f)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["vertices"]


def test_reports_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        run(["scale", "E3", "--json", str(f)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_manifest(tmp_path, capsys):
    m, out = tmp_path / "m.json", tmp_path / "r.json"
    run(["scale", "E1", "--json", str(out), "--manifest", str(m), "--seed", "7"], capsys)
    d = json.loads(m.read_text())
    assert d["seed"] == 7 and d["outputs"] == [str(out)]
    assert "scale" in d["timings"] and d["config"]["family"] == "padic"


@pytest.mark.parametrize("key", ["E4", "E2"])
def test_verify(key, capsys):
    code, out, _ = run(["verify", key], capsys)
    assert code == 0
    assert "FAIL" not in out


def test_write_atomic_leaves_no_partial_file(tmp_path):
    target = tmp_path / "x.bin"
    write_atomic(str(target), b"abc")
    assert target.read_bytes() == b"abc"

    with pytest.raises(TypeError):
        write_atomic(str(tmp_path / "y.bin"), "not bytes")
    assert sorted(os.listdir(tmp_path)) == ["x.bin"]


@pytest.mark.skipif(shutil.which("tdlc") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["tdlc", "catalogue"], capture_output=True, text=True)
    assert r.returncode == 0 and "E1" in r.stdout
    r = subprocess.run([sys.executable, "-m", "tdlc.cli", "scale", "E2", "--horizon", "0", "--json", "-"],
                       capture_output=True, text=True)
    assert r.returncode == 2
