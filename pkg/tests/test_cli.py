import json
import os

import pytest

from extlab.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_resolve_ascii(capsys, tmp_path):
    code, out, _ = run(
        ["resolve", "--module", "a", "--max-s", "4", "--max-t", "10",
         "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 0
    # a single dot at the origin: exactly one nonzero cell
    grid = [line for line in out.splitlines() if line.startswith("s=")]
    assert sum(cell.strip().isdigit() for line in grid for cell in line[5:].split()) == 1


def test_resolve_json_h0(capsys, tmp_path):
    code, out, _ = run(
        ["resolve", "--module", "f2", "--max-s", "6", "--max-t", "14",
         "--format", "json", "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "extlab.chart/1"
    assert doc["dims"][1][1] == 1  # h0
    assert doc["dims"][1][3] == 0
    assert doc["dims"][2][2] == 1  # h0^2


def test_resolve_tower(capsys, tmp_path):
    code, out, _ = run(
        ["resolve", "--module", "a-mod-sq1", "--max-s", "6", "--max-t", "14",
         "--format", "json", "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    for s in range(7):
        for t in range(15):
            assert doc["dims"][s][t] == (1 if s == t else 0)


def test_resolve_free_selector(capsys, tmp_path):
    code, out, _ = run(
        ["resolve", "--module", "free:2,4", "--max-s", "3", "--max-t", "8",
         "--format", "json", "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["dims"][0][2] == 1 and doc["dims"][0][4] == 1


def test_resolve_bad_module_exits_2(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["resolve", "--module", "bogus", "--max-s", "2", "--max-t", "4"])
    assert info.value.code == 2


def test_resolve_bad_bounds_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["resolve", "--module", "f2", "--max-s", "0", "--max-t", "4"])
    assert info.value.code == 2


def test_scenario_ok(capsys, tmp_path):
    code, out, err = run(
        ["scenario", "--kind", "fn", "--n", "2", "--max-s", "8", "--max-t", "16",
         "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 0
    assert "matches the closed form" in err


def test_scenario_missing_n_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["scenario", "--kind", "fnz"])
    assert info.value.code == 2


def test_scenario_hypothesis_failure_exits_1(capsys, tmp_path):
    # integral n=1 is degenerate; the tool must refuse and exit 1
    code, _, err = run(
        ["scenario", "--kind", "fnz", "--n", "1", "--max-s", "6", "--max-t", "12",
         "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 1
    assert "hypothesis FAILED" in err


def test_scenario_json(capsys, tmp_path):
    code, out, _ = run(
        ["scenario", "--kind", "f", "--max-s", "6", "--max-t", "14",
         "--format", "json", "--cache-dir", str(tmp_path)],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "extlab.scenario/1"
    assert doc["hypothesis_ok"] is True
    assert doc["diff"] == []
    stems = {(e["stem"], e["filtration"]) for e in doc["assembled"]["entries"]}
    assert (1, 1) in stems and (5, 0) in stems


def test_scenario_svg_output(capsys, tmp_path):
    out_path = tmp_path / "chart.svg"
    code, _, _ = run(
        ["scenario", "--kind", "fn", "--n", "1", "--max-s", "6", "--max-t", "12",
         "--format", "svg", "--output", str(out_path), "--cache-dir", str(tmp_path / "c")],
        capsys,
    )
    assert code == 0
    text = out_path.read_text()
    assert text.startswith("<?xml")
    assert "<svg" in text and "</svg>" in text
    assert "<circle" in text
    assert "<title>" in text  # hover annotations


def test_cache_env_override(capsys, tmp_path, monkeypatch):
    cache = tmp_path / "envcache"
    monkeypatch.setenv("EXTLAB_CACHE", str(cache))
    monkeypatch.chdir(tmp_path)
    code, _, _ = run(
        ["resolve", "--module", "f2", "--max-s", "3", "--max-t", "6"], capsys
    )
    assert code == 0
    assert cache.is_dir() and len(os.listdir(cache)) == 1


def test_no_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, _ = run(
        ["resolve", "--module", "f2", "--max-s", "3", "--max-t", "6", "--no-cache"],
        capsys,
    )
    assert code == 0
    assert not (tmp_path / ".extlab-cache").exists()


def test_verify_single_suite(capsys):
    code, out, _ = run(["verify", "--suite", "steenrod"], capsys)
    assert code == 0
    assert "[PASS]" in out
    assert "OK:" in out


def test_verify_json_report(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, _, _ = run(["verify", "--suite", "les", "--json-output", str(path)], capsys)
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["schema"] == "extlab.verify/1"
    assert doc["passed"] is True
    assert all(c["passed"] for c in doc["checks"])
