"""Pytest configuration and fixtures for TD-DBP toolkit tests."""

import json
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from src.channel.link import Transmission, transmit
from src.core.models import FilterBank, FirFilter, LinkParams, SimulationSettings
from src.filters.design import design_bank

DBP_RATE = 40e9


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: long-running oracle and training checks")


@pytest.fixture
def short_link() -> LinkParams:
    """Two 100 km spans with ASE noise."""
    return LinkParams(num_spans=2)


@pytest.fixture
def linear_link() -> LinkParams:
    """Two spans, no Kerr effect and no noise."""
    return LinkParams(num_spans=2, gamma=0.0, noise_enabled=False)


@pytest.fixture
def fast_sim() -> SimulationSettings:
    """Default rates with a coarse forward solver."""
    return SimulationSettings(forward_steps_per_span=10)


@pytest.fixture
def short_bank(short_link: LinkParams, fast_sim: SimulationSettings) -> FilterBank:
    """25-tap LS-CO bank for the two-span link."""
    return design_bank(short_link, 25, fast_sim.dbp_sample_rate)


@pytest.fixture
def impulse_bank() -> FilterBank:
    """Three pass-through filters."""
    return FilterBank(
        filters=(FirFilter.impulse(1),) * 3,
        step_sizes=(50e3, 100e3, 50e3),
        beta2=-21.7e-27,
        sample_rate=DBP_RATE,
    )


@pytest.fixture
def short_transmission(short_link: LinkParams, fast_sim: SimulationSettings) -> Transmission:
    """2048 symbols over the two-span link at 0 dBm."""
    return transmit(short_link, fast_sim, 2048, seed=11)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def write_spec(tmp_path: Path):
    """Write an experiment spec dict to tmp_path and return the file path."""

    def _write(data: dict[str, Any], name: str = "spec.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def small_spec_data() -> dict[str, Any]:
    """A sweep small enough to run in seconds."""
    return {
        "schema_version": 1,
        "name": "unit",
        "link": {"num_spans": 2},
        "simulation": {"forward_steps_per_span": 5},
        "variants": [
            {"name": "lsco_T9_float", "source": "lsco", "taps": 9},
            {
                "name": "lsco_T9_9bit",
                "source": "lsco",
                "taps": 9,
                "quant": {"signal_format": {"word_bits": 9}, "coeff_format": {"word_bits": 9}},
            },
        ],
        "sweep_dbm": [0.0],
        "symbols_per_point": 512,
        "seeds": [0],
    }
