"""The four standard figures render from a completed duct run directory."""

import subprocess
import sys
from pathlib import Path

import pytest

RENDER = Path(__file__).resolve().parent / "render.py"
SCENARIO = Path(__file__).resolve().parents[1] / "scenarios" / "duct_a0.toml"


@pytest.fixture(scope="module")
def duct_rundir(tmp_path_factory):
    out = tmp_path_factory.mktemp("duct_run")
    proc = subprocess.run(
        [sys.executable, "-m", "blowuplab.cli", "run", str(SCENARIO),
         "--out", str(out), "--resolution", "800"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.mark.parametrize("fig", ["characteristics", "profiles", "riccati", "scaling"])
def test_figures_render(duct_rundir, tmp_path, fig):
    out = tmp_path / f"{fig}.png"
    proc = subprocess.run(
        [sys.executable, str(RENDER), "--in", str(duct_rundir),
         "--fig", fig, "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists() and out.stat().st_size > 1000


def test_rejects_non_run_directory(tmp_path):
    proc = subprocess.run(
        [sys.executable, str(RENDER), "--in", str(tmp_path),
         "--fig", "profiles", "--out", str(tmp_path / "x.png")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "not a completed run" in proc.stderr
