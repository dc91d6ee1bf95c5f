"""CLI surface: commands, exit codes, deterministic outputs."""

import hashlib
import json

import pytest

from vizact.cli import run_command
from vizact.fixtures import fixture_text, script_text


@pytest.fixture()
def workspace(tmp_path):
    (tmp_path / "bars.json").write_text(fixture_text("bars"), encoding="utf-8")
    (tmp_path / "bars.script.json").write_text(script_text("bars"), encoding="utf-8")
    (tmp_path / "dnm.json").write_text(fixture_text("dnm"), encoding="utf-8")
    return tmp_path


def test_validate_clean_fixture(workspace, capsys):
    outcome = run_command(["validate", str(workspace / "bars.json")])
    assert outcome.exit_code == 0 and outcome.payload_kind == "diagnostics"
    assert capsys.readouterr().out == ""


def test_validate_broken_document(workspace, capsys):
    bad = workspace / "bad.json"
    bad.write_text('{"name":"x","data":[],"scales":[],'
                   '"scenes":[],"interactions":[{"name":"u","level":"technique",'
                   '"on":{"event":"click","listener":"s"},"target":"s"}]}',
                   encoding="utf-8")
    assert run_command(["validate", str(bad)]).exit_code == 1
    out = capsys.readouterr().out
    assert "E010_MISSING_TECHNIQUE" in out


def test_validate_missing_file(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        run_command(["validate", str(tmp_path / "ghost.json")])
    assert exc.value.code == 3


def test_unknown_flag_exits_2(workspace):
    with pytest.raises(SystemExit) as exc:
        run_command(["validate", "--nope", str(workspace / "bars.json")])
    assert exc.value.code == 2


def test_compile_outputs_json(workspace, capsys):
    outcome = run_command(["compile", str(workspace / "bars.json")])
    assert outcome.exit_code == 0 and outcome.payload_kind == "report"
    payload = json.loads(capsys.readouterr().out)
    assert [u["technique"] for u in payload] == ["point_select", "deselect"]
    assert payload[0]["graph"]["rules"]


def test_explain_md_matches_case_study(workspace, capsys):
    assert run_command(["explain", str(workspace / "dnm.json"), "--format", "md"]).exit_code == 0
    out = capsys.readouterr().out
    assert "| Add Magnet | enter | add mark | choose field | dropdown menu | none | new magnet | target data |" in out


def test_run_twice_identical_hashes(workspace, tmp_path):
    out1 = tmp_path / "a.trace"
    out2 = tmp_path / "b.trace"
    assert run_command(["run", str(workspace / "bars.json"),
                        str(workspace / "bars.script.json"), "-o", str(out1)]).exit_code == 0
    assert run_command(["run", str(workspace / "bars.json"),
                        str(workspace / "bars.script.json"), "-o", str(out2)]).exit_code == 0
    h1 = hashlib.sha256(out1.read_bytes()).hexdigest()
    h2 = hashlib.sha256(out2.read_bytes()).hexdigest()
    assert h1 == h2


def test_run_compile_error_exit_1(workspace, capsys):
    raw = json.loads(fixture_text("bars"))
    raw["interactions"][0]["technique"] = "levitate"
    bad = workspace / "bad.json"
    bad.write_text(json.dumps(raw), encoding="utf-8")
    assert run_command(["run", str(bad), str(workspace / "bars.script.json")]).exit_code == 1


def test_render_initial_and_at_tick(workspace, capsys):
    outcome = run_command(["render", str(workspace / "bars.json")])
    assert outcome.exit_code == 0 and outcome.payload_kind == "svg"
    initial = capsys.readouterr().out
    assert initial.count("<rect") == 3
    assert run_command(["render", str(workspace / "bars.json"),
                        "--script", str(workspace / "bars.script.json"), "--tick", "1"]).exit_code == 0
    after = capsys.readouterr().out
    assert initial != after and 'stroke="#000"' in after


def test_init_writes_fixture_pair(tmp_path, capsys):
    assert run_command(["init", "scatter", "--dir", str(tmp_path)]).exit_code == 0
    assert (tmp_path / "scatter.json").exists()
    assert (tmp_path / "scatter.script.json").exists()
    payload = json.loads((tmp_path / "scatter.json").read_text(encoding="utf-8"))
    assert payload["name"] == "scatter"


def test_init_unknown_example(tmp_path):
    assert run_command(["init", "mystery", "--dir", str(tmp_path)]).exit_code == 2


def test_csv_rows_resolve_relative_to_document(tmp_path, capsys):
    (tmp_path / "t.csv").write_text("k,v\na,1\nb,2\n", encoding="utf-8")
    doc = {
        "name": "csvdoc",
        "data": [{"name": "t", "rows": {"csv": "t.csv"}}],
        "scales": [],
        "scenes": [{"name": "s", "objects": [
            {"name": "c", "kind": "collection", "sourceTable": "t",
             "template": {"kind": "mark", "markShape": "rect"}}]}],
        "interactions": [],
    }
    path = tmp_path / "doc.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert run_command(["validate", str(path)]).exit_code == 0


def test_compile_output_deterministic(workspace, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run_command(["compile", str(workspace / "bars.json"), "--out", str(a)])
    run_command(["compile", str(workspace / "bars.json"), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
