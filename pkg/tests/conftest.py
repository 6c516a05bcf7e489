import json

import pytest

from sppc.field import FieldContext
from sppc.params import derive_params
from sppc.simulate import SimConfig, bundled_config


def grid_configs():
    raw = json.loads(bundled_config("grid").read_text())
    return [SimConfig.from_dict(dict(pt, seed=i)) for i, pt in enumerate(raw["points"])]


GRID = grid_configs()


@pytest.fixture
def ex3d():
    """The 21-server worked example with two candidates spanning dimension 2."""
    return SimConfig.load(bundled_config("example_3d"))


@pytest.fixture
def f29():
    return FieldContext(29)


@pytest.fixture
def f11():
    return FieldContext(11)


def tiny_params(**kw):
    base = dict(N=5, K=1, X=1, T=1, B=0, U=0, G=1, M=2, P=2, q=11, F=2)
    base.update(kw)
    return derive_params(**base)


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
