import json
from pathlib import Path

import pytest

from vkampen.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "json")
    return code, json.loads(out.out)


def test_snf(capsys):
    code, rep = run_json(capsys, "snf", DATA / "matrix.json")
    assert code == 0
    assert rep["invariant_factors"] == ["2", "6", "12"]
    assert rep["schema_version"] == "1"


@pytest.mark.parametrize("ring, expected", [("Z", "Z/2"), ("Z2", "Z/2")])
def test_homology_rp2(capsys, ring, expected):
    code, out = run(capsys, "homology", DATA / "rp2.json", "--ring", ring)
    assert code == 0 and expected in out.out


def test_vk_assert_zero_exit_codes(capsys):
    assert run(capsys, "vk", DATA / "k5.json", "-m", "2", "--assert-zero")[0] == 1
    assert run(capsys, "vk", DATA / "k5_minus_edge.json", "-m", "2", "--assert-zero")[0] == 0
    assert run(capsys, "vk", DATA / "k5.json", "-m", "2")[0] == 0


def test_coindex(capsys):
    code, out = run(capsys, "coindex", DATA / "k5.json")
    assert code == 0 and "2" in out.out


def test_tower_and_delta(capsys):
    code, rep = run_json(capsys, "tower", DATA / "ptower.json")
    assert code == 0 and "fails" in json.dumps(rep)
    code, _ = run(capsys, "delta218", "--depth", "4")
    assert code == 0


def test_stagecheck(capsys):
    code, _ = run(capsys, "stagecheck", DATA / "k5_tail_stage.json")
    assert code == 0


def test_atlas(capsys):
    code, out = run(capsys, "atlas", "list")
    assert code == 0 and "ljubljana" in out.out
    code, rep = run_json(capsys, "atlas", "build", "sklyarenko", "--param", "k=3")
    assert code == 0
    code, _ = run(capsys, "atlas", "build", "no-such-entry")
    assert code == 3


def test_accept_subset(capsys):
    code, out = run(capsys, "accept", "--only", "1,5", "--cases", "10")
    assert code == 0
    assert out.out.count("[PASS]") == 2


def test_json_is_byte_identical(capsys):
    _, a = run(capsys, "vk", DATA / "k5.json", "-m", "2", "--format", "json")
    _, b = run(capsys, "vk", DATA / "k5.json", "-m", "2", "--format", "json")
    assert a.out == b.out


def test_output_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("VKAMPEN_OUTPUT_DIR", str(tmp_path))
    import importlib, vkampen.cli as cli
    importlib.reload(cli)
    assert cli.main(["snf", str(DATA / "matrix.json")]) == 0
    written = tmp_path / "snf-matrix.json"
    assert json.loads(written.read_text())["command"] == "snf"
    monkeypatch.delenv("VKAMPEN_OUTPUT_DIR")
    importlib.reload(cli)


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    assert main(["snf", str(DATA / "matrix.json"), "-o", str(target)]) == 0
    assert json.loads(target.read_text())["command"] == "snf"


def test_malformed_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"a": 1\n "b": 2}')
    code, out = run(capsys, "snf", bad)
    assert code == 3
    assert "bad.json:2:" in out.err


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "homology", tmp_path / "nope.json")[0] == 3


def test_explicit_tower_without_hint_is_inconclusive(capsys, tmp_path):
    from vkampen.atlas import sklyarenko_stage
    t = sklyarenko_stage(2, 2, 3).tower(declared=False)
    path = tmp_path / "t.json"
    path.write_text(json.dumps(t.to_json()))
    code, out = run(capsys, "tower", path)
    assert code == 2
    assert "inconclusive" in out.out.lower()


def test_unsupported_tower_variant(capsys, tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"variant": "arbitrary"}))
    assert run(capsys, "tower", path)[0] == 3
