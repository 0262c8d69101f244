import runpy
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def run_script(name, argv, monkeypatch):
    monkeypatch.setattr(sys, "argv", [name, *argv])
    runpy.run_path(str(SCRIPTS / name), run_name="__main__")


def test_failure_script(capsys, monkeypatch):
    run_script("failure_scenario.py", [], monkeypatch)
    out = capsys.readouterr().out
    assert "safety: OK" in out and "(failed)" in out


def test_bench_script(tmp_path, capsys, monkeypatch):
    out = tmp_path / "b.csv"
    run_script("run_bench.py", ["--counts", "5", "--reps", "2", "--workers", "1", "--out", str(out)], monkeypatch)
    assert out.read_text().startswith("task_count,profile")
