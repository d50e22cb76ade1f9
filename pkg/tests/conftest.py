"""Shared fixtures: the positive-measure set catalog and CLI run helper."""

import os

import pytest

import rieszpol as rp
from rieszpol import cli


def catalog_sets():
    """Representative instance of every positive-measure set kind."""
    two_circles = rp.union(
        rp.placed(rp.circle(), offset=(-2.0, 0.0)),
        rp.placed(rp.circle(), offset=(2.0, 0.0)),
    )
    return [
        ("circle", rp.circle()),
        ("arc", rp.arc(1.0, 2.0)),
        ("segment", rp.segment(2.0)),
        ("ball2", rp.ball(2)),
        ("ball3", rp.ball(3)),
        ("cube2", rp.cube(2)),
        ("sphere2", rp.sphere(2)),
        ("two_circles", two_circles),
    ]


@pytest.fixture(scope="session")
def catalog():
    return catalog_sets()


@pytest.fixture()
def run_cli(tmp_path, monkeypatch):
    """Run a config text through the CLI in tmp_path; returns (code, report path)."""

    def _run(text, subdir="run", threads=None):
        d = tmp_path / subdir
        d.mkdir(parents=True, exist_ok=True)
        monkeypatch.chdir(d)
        if threads is not None:
            monkeypatch.setenv("RIESZPOL_THREADS", str(threads))
        else:
            monkeypatch.delenv("RIESZPOL_THREADS", raising=False)
        cfg = cli.parse_config(text)
        code = cli.run(cfg)
        out = cfg.output or f"rieszpol-{cfg.command}.json"
        return code, d / out

    return _run


@pytest.fixture(autouse=True)
def _single_thread_default(monkeypatch):
    # determinism tests set RIESZPOL_THREADS explicitly; everything else
    # must not inherit a stale value from the environment
    if "RIESZPOL_THREADS" in os.environ:
        monkeypatch.delenv("RIESZPOL_THREADS")
    yield
