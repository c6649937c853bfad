"""Acceptance suite: one line per criterion, PASS/FAIL with wall time."""
import subprocess
import sys
from pathlib import Path

import pytest

from cartier_lab.acceptance import TITLES, artifact_bytes, determinism_check, run_criteria

SEED = 42


@pytest.fixture(scope="session")
def results():
    return {r.number: r for r in run_criteria(SEED)}


@pytest.fixture(scope="session")
def rerun_artifact(tmp_path_factory):
    def rerun():
        out = tmp_path_factory.mktemp("rerun") / "artifact.json"
        cmd = [sys.executable, "-m", "cartier_lab", "verify-paper", "--seed", str(SEED),
               "--no-rerun", "--artifact", str(out)]
        subprocess.run(cmd, check=False, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        return out.read_bytes() if out.exists() else b""
    return rerun


def report(capsys, line):
    with capsys.disabled():
        print("\n" + line)


@pytest.mark.parametrize("number", range(1, 12), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number, results, capsys):
    r = results[number]
    assert r.title == TITLES[number]
    report(capsys, r.line())
    assert r.verified, r.detail
    assert r.within_budget, f"{r.seconds:.2f}s exceeds {r.budget}s"


def test_criterion_12_determinism(results, rerun_artifact, capsys):
    first = artifact_bytes([results[n] for n in sorted(results)], SEED)
    r = determinism_check(first, rerun_artifact)
    report(capsys, r.line())
    assert r.passed, r.detail
