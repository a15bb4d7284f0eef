"""Shared fixtures for engine tests."""

import pytest

from dqdcorr.engine.config import WORKERS_ENV
from dqdcorr.engine.model import ModelParams
from dqdcorr.engine.thermal import RhoElements, Temperature, ThermalState, assemble_rho


@pytest.fixture(autouse=True)
def isolated_run(monkeypatch, tmp_path):
    """Run every test in-process from an empty directory (no dqdcorr.yaml)."""
    monkeypatch.setenv(WORKERS_ENV, "1")
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def strong_coulomb():
    """Δ1 = 10, Δ2 = 15, V = 16 Δ1."""
    return ModelParams(delta1=10.0, delta2=15.0, v=160.0)


@pytest.fixture
def weak_coulomb():
    """Δ1 = 10, Δ2 = 15, V = Δ1 / 6."""
    return ModelParams(delta1=10.0, delta2=15.0, v=10.0 / 6.0)


@pytest.fixture
def make_state():
    """Build a ThermalState from hand-picked elements."""

    def make(*elements: float) -> ThermalState:
        el = RhoElements(*elements)
        return ThermalState(
            rho=assemble_rho(el),
            elements=el,
            z=1.0,
            shift=0.0,
            params=ModelParams(delta1=0.0, delta2=0.0, v=0.0),
            temp=Temperature.zero(),
            source="analytic",
        )

    return make
