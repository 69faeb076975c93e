"""The narrative scripts under walkthroughs/ run to completion."""
import runpy
from pathlib import Path

import pytest

SCRIPTS = sorted((Path(__file__).parents[1] / "walkthroughs").glob("*.py"))


@pytest.mark.parametrize("path", SCRIPTS, ids=[p.stem for p in SCRIPTS])
def test_walkthrough_runs(path, monkeypatch, capsys):
    monkeypatch.setenv("PERMSURV_REPS", "20")
    runpy.run_path(str(path), run_name="__main__")
    assert capsys.readouterr().out
