import numpy as np
import pytest

from hetnet_dcop.assignment import total_rate
from hetnet_dcop.dcop import (
    INTER,
    INTRA,
    Reward,
    VIOLATED,
    build_model,
    candidate_bs,
    constraint_reward,
    model_utility,
    state_feasible,
    state_utility,
    top_candidates,
)
from hetnet_dcop.netmodel import ChannelState, compute_channel

from conftest import make_fig1_channel, make_fig1_scenario, tiny_model


@pytest.fixture
def fig1():
    scenario = make_fig1_scenario()
    return scenario, make_fig1_channel(scenario)


def test_reward_addition_absorbs_violation():
    assert (Reward.finite(2.0) + Reward.finite(3.0)).value == 5.0
    assert (Reward.finite(2.0) + VIOLATED).is_violated
    assert (VIOLATED + VIOLATED).is_violated


def test_candidate_sets_of_worked_instance(fig1):
    scenario, channel = fig1
    assert candidate_bs(1, scenario, channel) == [1, 2]
    assert candidate_bs(2, scenario, channel) == [1, 2]
    assert candidate_bs(3, scenario, channel) == [1]
    assert candidate_bs(4, scenario, channel) == [2]


def test_candidate_requires_positive_rate(fig1):
    scenario, _ = fig1
    dead = ChannelState.from_unit_rates(scenario, np.zeros((2, 4)))
    assert candidate_bs(1, scenario, dead) == []


def test_candidate_respects_rb_budget(fig1):
    scenario, _ = fig1
    # 0.8 bit/s needs 4 RBs; station 2's column forces 4 > budget via tiny rate
    unit = np.array([[0.8, 0.8, 0.8, 0.8],
                     [0.2, 0.2, 0.2, 0.2]])  # needs 15 RBs > 10
    channel = ChannelState.from_unit_rates(scenario, unit)
    assert candidate_bs(1, scenario, channel) == [1]


def test_top_candidates_orders_by_sinr(fig1):
    scenario, channel = fig1
    # station 2 has the higher per-RB rate (and stub SINR) for user 1
    assert top_candidates([1, 2], 1, 2, channel) == [2, 1]
    assert top_candidates([1, 2], 1, 1, channel) == [2]
    with pytest.raises(ValueError):
        top_candidates([1, 2], 1, 0, channel)


def test_top_candidates_matches_linear_scan_argmax(fig1):
    scenario, _ = fig1
    rng = np.random.default_rng(5)
    for _ in range(25):
        sinr = rng.uniform(0.1, 9.0, size=(2, 4))
        channel = ChannelState.from_unit_rates(scenario, sinr, sinr=sinr)
        best = top_candidates([1, 2], 1, 1, channel)[0]
        uj = channel.user_index[1]
        scan = max(((channel.sinr[channel.bs_index[b], uj], -b) for b in (1, 2)))
        assert best == -scan[1]


def test_top_candidates_tie_keeps_station_order(fig1):
    scenario, _ = fig1
    unit = np.full((2, 4), 0.8)
    channel = ChannelState.from_unit_rates(scenario, unit)
    assert top_candidates([1, 2], 1, 2, channel) == [1, 2]


def test_build_model_worked_instance(fig1):
    scenario, channel = fig1
    model = build_model(scenario, channel, eta=2)
    assert model.agents == (1, 2)
    connections = {(v.bs_id, v.user_id) for v in model.variables}
    assert connections == {(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 4)}
    doms = {(v.bs_id, v.user_id): v.domain for v in model.variables}
    assert doms[(1, 1)] == (0, 4) and doms[(2, 1)] == (0, 3)
    inter = model.inter_constraints()
    intra = model.intra_constraints()
    assert len(inter) == 2 and len(intra) == 2
    assert all(len(c.scope) == 2 for c in inter)
    assert sorted(len(c.scope) for c in intra) == [3, 3]
    assert {c.anchor for c in inter} == {1, 2}


def test_build_model_eta_one_has_no_inter_constraints(fig1):
    scenario, channel = fig1
    model = build_model(scenario, channel, eta=1)
    assert model.inter_constraints() == []
    assert model.n_variables == 4  # one connection per user


def test_build_model_without_users():
    scenario = make_fig1_scenario()
    empty = scenario.__class__(area=scenario.area, tiers=scenario.tiers,
                               base_stations=scenario.base_stations, users=(),
                               radio=scenario.radio)
    channel = ChannelState.from_unit_rates(empty, np.zeros((2, 0)))
    model = build_model(empty, channel, eta=3)
    assert len(model.agents) == 2
    assert model.n_variables == 0
    assert [c for c in model.constraints if c.scope] == []


def test_intra_reward_overload_and_rate_sum(fig1):
    scenario, channel = fig1
    model = build_model(scenario, channel, eta=2)
    intra1 = next(c for c in model.intra_constraints() if c.anchor == 1)
    assert constraint_reward(model, intra1, (4, 4, 4)).is_violated  # 12 > 8
    partial = constraint_reward(model, intra1, (4, 4, 0))
    assert partial.value == 0.8 * 4 + 0.8 * 4

    # 12-RB variant: three 4-RB users fit and earn 0.8*4*3 = 9.6 bit/s
    roomy = scenario.__class__(
        area=scenario.area, tiers=scenario.tiers,
        base_stations=(scenario.base_stations[0].__class__(
            id=1, tier_id=1, position=(100.0, 100.0), total_rbs=12),
            scenario.base_stations[1]),
        users=scenario.users, radio=scenario.radio)
    channel12 = make_fig1_channel(roomy)
    model12 = build_model(roomy, channel12, eta=2)
    intra12 = next(c for c in model12.intra_constraints() if c.anchor == 1)
    reward = constraint_reward(model12, intra12, (4, 4, 4))
    assert not reward.is_violated
    assert reward.value == 0.8 * 4 + 0.8 * 4 + 0.8 * 4
    assert reward.value == pytest.approx(9.6)


def test_inter_reward_unique_connection(fig1):
    scenario, channel = fig1
    model = build_model(scenario, channel, eta=2)
    inter1 = next(c for c in model.inter_constraints() if c.anchor == 1)
    # scope order is (station 2, station 1): values 3 and 4 double-connect
    assert constraint_reward(model, inter1, (3, 4)).is_violated
    assert constraint_reward(model, inter1, (0, 4)).value == 0.0
    assert constraint_reward(model, inter1, (3, 0)).value == 0.0
    assert constraint_reward(model, inter1, (0, 0)).value == 0.0


def test_constraint_reward_rejects_out_of_domain_values(fig1):
    scenario, channel = fig1
    model = build_model(scenario, channel, eta=2)
    inter1 = model.inter_constraints()[0]
    with pytest.raises(ValueError, match="outside domain"):
        constraint_reward(model, inter1, (1, 0))


def test_model_utility_absorbs_and_zero_state(fig1):
    scenario, channel = fig1
    model = build_model(scenario, channel, eta=2)
    zero = [0] * model.n_variables
    assert model_utility(model, zero).value == 0.0
    overload = [0, 4, 0, 4, 4, 0]  # 12 RBs on station 1
    assert model_utility(model, overload).is_violated
    double = [3, 4, 0, 0, 0, 0]  # user 1 on both stations
    assert model_utility(model, double).is_violated


def test_model_utility_equals_total_rate_exactly():
    for seed in range(8):
        scenario, channel, model = tiny_model(seed)
        rng = np.random.default_rng(seed)
        found = 0
        while found < 20:
            active = rng.random(model.n_variables) < 0.4
            if not state_feasible(model, active):
                continue
            found += 1
            values = [int(model.var_n[k]) if active[k] else 0
                      for k in range(model.n_variables)]
            reward = model_utility(model, values)
            assert not reward.is_violated
            induced = model.induced_assignment(values)
            assert reward.value == total_rate(induced, channel)
            assert reward.value == state_utility(model, active)


def test_every_variable_sits_in_one_intra_and_at_most_one_inter():
    for seed in range(6):
        _, _, model = tiny_model(seed)
        intra_hits = {k: 0 for k in range(model.n_variables)}
        inter_hits = {k: 0 for k in range(model.n_variables)}
        for c in model.constraints:
            bucket = intra_hits if c.kind == INTRA else inter_hits
            for k in c.scope:
                bucket[k] += 1
        assert all(v == 1 for v in intra_hits.values())
        assert all(v <= 1 for v in inter_hits.values())


def test_scale_bounds_and_eta_saturation():
    from hetnet_dcop.scenarios import generate_scenario

    scenario = generate_scenario(3, 40)
    channel = compute_channel(scenario, np.random.default_rng(4))
    for eta in (1, 2, 3, 5):
        model = build_model(scenario, channel, eta)
        assert model.n_variables <= eta * len(scenario.users)
        assert len(model.inter_constraints()) <= len(scenario.users)
    full = build_model(scenario, channel, eta=len(scenario.base_stations))
    wide = build_model(scenario, channel, eta=999)
    assert full.variables == wide.variables
    assert full.constraints == wide.constraints


def test_describe_golden(fig1):
    scenario, channel = fig1
    model = build_model(scenario, channel, eta=2)
    assert model.describe() == """\
agents: 2  variables: 6  constraints: 4  eta: 2
agent bs=1 capacity=8 variables=3
  var[1] bs=1 user=1 domain={0,4} rate=3.2
  var[3] bs=1 user=2 domain={0,4} rate=3.2
  var[4] bs=1 user=3 domain={0,4} rate=3.2
agent bs=2 capacity=10 variables=3
  var[0] bs=2 user=1 domain={0,3} rate=3
  var[2] bs=2 user=2 domain={0,3} rate=3
  var[5] bs=2 user=4 domain={0,3} rate=3
single-association user=1 scope=[0, 1] (bs=2),(bs=1)
single-association user=2 scope=[2, 3] (bs=2),(bs=1)
"""
