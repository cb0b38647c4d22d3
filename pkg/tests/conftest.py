"""Shared fixtures: the two-station worked instance and tiny random scenarios."""

from __future__ import annotations

import numpy as np
import pytest

from hetnet_dcop.dcop import build_model
from hetnet_dcop.netmodel import (
    BaseStation,
    ChannelState,
    Scenario,
    Tier,
    User,
    compute_channel,
)


def make_fig1_scenario() -> Scenario:
    """Two stations (8 and 10 RBs), four users, 3 bit/s requirement."""
    tier = Tier(id=1, tx_power_dbm=40.0, pathloss_a=34.0, pathloss_b=40.0)
    stations = (
        BaseStation(id=1, tier_id=1, position=(100.0, 100.0), total_rbs=8),
        BaseStation(id=2, tier_id=1, position=(200.0, 100.0), total_rbs=10),
    )
    users = tuple(User(id=j, position=(150.0, 100.0), rate_requirement=3.0)
                  for j in (1, 2, 3, 4))
    return Scenario(area=(300.0, 300.0), tiers=(tier,), base_stations=stations,
                    users=users)


def make_fig1_channel(scenario: Scenario) -> ChannelState:
    """Per-RB rates 0.8 on station 1 and 1.0 on station 2; users 3 and 4 are
    reachable from only one station each."""
    unit = np.array([
        [0.8, 0.8, 0.8, 0.0],
        [1.0, 1.0, 0.0, 1.0],
    ])
    return ChannelState.from_unit_rates(scenario, unit)


def make_tiny_scenario(seed: int) -> Scenario:
    """2-3 stations, 3-5 users, budgets <= 10 RBs, in a 300 m square."""
    rng = np.random.default_rng(seed)
    n_stations = int(rng.integers(2, 4))
    n_users = int(rng.integers(3, 6))
    side = 300.0
    tier = Tier(id=1, tx_power_dbm=30.0, pathloss_a=34.0, pathloss_b=40.0)
    stations = tuple(
        BaseStation(id=i, tier_id=1,
                    position=(float(p[0]), float(p[1])),
                    total_rbs=int(rng.integers(4, 11)))
        for i, p in enumerate(rng.uniform(0.0, side, size=(n_stations, 2))))
    users = tuple(
        User(id=j, position=(float(p[0]), float(p[1])), rate_requirement=3.0)
        for j, p in enumerate(rng.uniform(0.0, side, size=(n_users, 2))))
    return Scenario(area=(side, side), tiers=(tier,), base_stations=stations,
                    users=users)


def tiny_model(seed: int):
    scenario = make_tiny_scenario(seed)
    channel = compute_channel(scenario, np.random.default_rng(1000 + seed))
    return scenario, channel, build_model(scenario, channel,
                                          eta=len(scenario.base_stations))


@pytest.fixture
def fig1_scenario():
    return make_fig1_scenario()


@pytest.fixture
def fig1_channel(fig1_scenario):
    return make_fig1_channel(fig1_scenario)


@pytest.fixture
def fig1_model(fig1_scenario, fig1_channel):
    return build_model(fig1_scenario, fig1_channel, eta=2)
