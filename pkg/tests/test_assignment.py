import numpy as np
import pytest

from hetnet_dcop.assignment import (
    Assignment,
    non_served_users,
    per_user_rate,
    total_rate,
    validate,
    write_assignment_csv,
)

from conftest import make_fig1_channel, make_fig1_scenario


@pytest.fixture
def fig1():
    scenario = make_fig1_scenario()
    return scenario, make_fig1_channel(scenario)


def test_total_rate_three_users_four_rbs(fig1):
    scenario, channel = fig1
    a = Assignment({(1, 1): 4, (1, 2): 4, (1, 3): 4})
    # left-to-right sum of the per-user products, 0.8*4 each
    assert total_rate(a, channel) == 0.8 * 4 + 0.8 * 4 + 0.8 * 4
    assert total_rate(a, channel) == pytest.approx(9.6)


def test_total_rate_trivial_cases(fig1):
    scenario, channel = fig1
    assert total_rate(Assignment(), channel) == 0.0
    assert total_rate(Assignment({(2, 1): 3}), channel) == 3.0


def test_total_rate_additive_on_disjoint_parts(fig1):
    scenario, channel = fig1
    left = Assignment({(1, 1): 4, (2, 4): 3})
    right = Assignment({(1, 3): 4, (2, 2): 3})
    union = Assignment({**left.alloc, **right.alloc})
    assert total_rate(union, channel) == pytest.approx(
        total_rate(left, channel) + total_rate(right, channel), rel=1e-12)


def test_total_rate_unknown_ids_raise(fig1):
    scenario, channel = fig1
    with pytest.raises(KeyError, match="base station"):
        total_rate(Assignment({(9, 1): 1}), channel)
    with pytest.raises(KeyError, match="user"):
        total_rate(Assignment({(1, 9): 1}), channel)


def test_assignment_rejects_zero_counts():
    with pytest.raises(ValueError):
        Assignment({(1, 1): 0})
    a = Assignment()
    with pytest.raises(ValueError):
        a.grant(1, 1, -2)


def test_validate_capacity_overrun(fig1):
    scenario, channel = fig1
    a = Assignment({(1, 1): 4, (1, 2): 4, (1, 3): 4})  # 12 RBs on an 8-RB station
    report = validate(a, scenario, channel)
    assert report.capacity_violations == [(1, 12, 8)]
    assert not report.uniqueness_violations
    assert not report.range_violations


def test_validate_double_association(fig1):
    scenario, channel = fig1
    a = Assignment({(1, 1): 4, (2, 1): 3})
    report = validate(a, scenario, channel)
    assert report.uniqueness_violations == [1]
    assert not report.capacity_violations


def test_validate_empty_assignment_flags_every_user(fig1):
    scenario, channel = fig1
    report = validate(Assignment(), scenario, channel)
    assert report.qos_violations == [1, 2, 3, 4]
    assert not report.capacity_violations
    assert not report.uniqueness_violations
    assert not report.range_violations
    assert not report.ok


def test_validate_range_overrun(fig1):
    scenario, channel = fig1
    report = validate(Assignment({(1, 1): 9}), scenario, channel)
    assert report.range_violations == [(1, 1)]
    # also counted as a capacity overrun on that station
    assert report.capacity_violations == [(1, 9, 8)]


def test_validate_clean_assignment(fig1):
    scenario, channel = fig1
    a = Assignment({(1, 1): 4, (2, 2): 3, (1, 3): 4, (2, 4): 3})
    assert validate(a, scenario, channel).ok


def test_non_served_users(fig1):
    scenario, _ = fig1
    assert non_served_users(Assignment(), scenario) == [1, 2, 3, 4]
    full = Assignment({(1, 1): 4, (2, 2): 3, (1, 3): 4, (2, 4): 3})
    assert non_served_users(full, scenario) == []
    partial = Assignment({(1, 1): 4, (1, 3): 4})
    assert non_served_users(partial, scenario) == [2, 4]


def test_per_user_rate_defaults_to_zero(fig1):
    scenario, channel = fig1
    rates = per_user_rate(Assignment({(2, 1): 3}), scenario, channel)
    assert rates[1] == 3.0
    assert rates[2] == rates[3] == rates[4] == 0.0


def test_assignment_csv_dump(fig1, tmp_path):
    scenario, channel = fig1
    a = Assignment({(2, 4): 3, (1, 1): 4})
    path = tmp_path / "alloc.csv"
    write_assignment_csv(a, channel, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "bs_id,user_id,n_rbs,rate_bps"
    assert lines[1] == f"1,1,4,{0.8 * 4!r}"
    assert lines[2] == f"2,4,3,{1.0 * 3!r}"
