"""
Shared fixtures: the G1 line graph (with battery levels), the triangle and their traces
"""

import sys
from pathlib import Path

import pytest

# Add src directory to Python path
src_dir = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_dir))

from trace_io import LabeledTrace, make_snapshot  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale corpora and scenarios")


def g1_snapshot(step=0, kinds=("q", "q", "p"), battery=(5.0, 3.0, 7.0)):
    """a <-> b <-> c with unit weights; q at a and b, p at c by default"""
    nodes = [{"id": loc, "kind": kind, "attrs": {"battery": level}}
             for loc, kind, level in zip("abc", kinds, battery)]
    return make_snapshot(nodes, [("a", 1.0, "b"), ("b", 1.0, "c")], step=step, undirected=True)


@pytest.fixture
def g1():
    return g1_snapshot()


@pytest.fixture
def g1_trace():
    return LabeledTrace([g1_snapshot()])


@pytest.fixture
def triangle():
    nodes = [{"id": loc, "kind": "p"} for loc in "abc"]
    return make_snapshot(nodes, [("a", 1.0, "b"), ("b", 1.0, "c"), ("c", 1.0, "a")], undirected=True)


@pytest.fixture
def single_location_trace():
    """One location over four steps, p only at t=2"""
    return LabeledTrace([make_snapshot([{"id": "a", "kind": "p" if t == 2 else "r"}], step=t) for t in range(4)])
