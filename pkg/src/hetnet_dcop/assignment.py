"""Candidate solutions: sparse RB allocations plus the feasibility checks of
the mixed-integer formulation (rate QoS, per-station capacity, single
association, allocation range)."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .netmodel import ChannelState, Scenario


@dataclass
class Assignment:
    """RB allocation keyed by (bs_id, user_id); absence means zero RBs."""

    alloc: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        for key, n in self.alloc.items():
            if int(n) != n or n < 1:
                raise ValueError(f"allocation {key} must be an integer >= 1, got {n!r}")
            self.alloc[key] = int(n)

    def grant(self, bs_id: int, user_id: int, n_rbs: int) -> None:
        if int(n_rbs) != n_rbs or n_rbs < 1:
            raise ValueError(f"n_rbs must be an integer >= 1, got {n_rbs!r}")
        self.alloc[(bs_id, user_id)] = int(n_rbs)

    def served_users(self) -> set[int]:
        return {user_id for _, user_id in self.alloc}

    def rbs_used(self) -> dict[int, int]:
        used: dict[int, int] = {}
        for (bs_id, _), n in self.alloc.items():
            used[bs_id] = used.get(bs_id, 0) + n
        return used

    def __len__(self) -> int:
        return len(self.alloc)


@dataclass
class ViolationReport:
    """Constraint violations of one assignment; empty everywhere iff feasible."""

    qos_violations: list[int] = field(default_factory=list)
    capacity_violations: list[tuple[int, int, int]] = field(default_factory=list)
    uniqueness_violations: list[int] = field(default_factory=list)
    range_violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.qos_violations or self.capacity_violations
                    or self.uniqueness_violations or self.range_violations)


def _indices(assignment: Assignment, channel: ChannelState):
    """Resolve allocation keys to matrix positions; unknown ids are errors."""
    entries = []
    for (bs_id, user_id), n in assignment.alloc.items():
        try:
            bi = channel.bs_index[bs_id]
        except KeyError:
            raise KeyError(f"unknown base station id {bs_id}") from None
        try:
            uj = channel.user_index[user_id]
        except KeyError:
            raise KeyError(f"unknown user id {user_id}") from None
        entries.append((bi, uj, n))
    entries.sort()
    return entries


def total_rate(assignment: Assignment, channel: ChannelState) -> float:
    """Sum of delivered rates n_ij*u_ij over stored entries, in bit/s.

    Summed per station then across stations (matching the constraint-model
    utility bit for bit on solver outputs).
    """
    total = 0.0
    sub = 0.0
    prev_bi = None
    for bi, uj, n in _indices(assignment, channel):
        if prev_bi is not None and bi != prev_bi:
            total += sub
            sub = 0.0
        sub += n * float(channel.unit_rate[bi, uj])
        prev_bi = bi
    total += sub
    return total


def per_user_rate(assignment: Assignment, scenario: Scenario,
                  channel: ChannelState) -> dict[int, float]:
    """Achieved rate per user id, 0.0 for non-served users."""
    rates = {u.id: 0.0 for u in scenario.users}
    for (bs_id, user_id), n in assignment.alloc.items():
        bi = channel.bs_index[bs_id]
        uj = channel.user_index[user_id]
        rates[user_id] += n * float(channel.unit_rate[bi, uj])
    return rates


def validate(assignment: Assignment, scenario: Scenario,
             channel: ChannelState) -> ViolationReport:
    """Check each constraint family independently; violations are data."""
    report = ViolationReport()

    achieved = per_user_rate(assignment, scenario, channel)
    for user in scenario.users:
        if achieved[user.id] < user.rate_requirement:
            report.qos_violations.append(user.id)

    used = assignment.rbs_used()
    for bs in scenario.base_stations:
        total = used.get(bs.id, 0)
        if total > bs.total_rbs:
            report.capacity_violations.append((bs.id, total, bs.total_rbs))

    serving: dict[int, set[int]] = {}
    for (bs_id, user_id) in assignment.alloc:
        serving.setdefault(user_id, set()).add(bs_id)
    for user_id in sorted(serving):
        if len(serving[user_id]) > 1:
            report.uniqueness_violations.append(user_id)

    bs_by_id = {b.id: b for b in scenario.base_stations}
    for (bs_id, user_id), n in sorted(assignment.alloc.items()):
        bs = bs_by_id.get(bs_id)
        if bs is None or n < 0 or n > bs.total_rbs:
            report.range_violations.append((bs_id, user_id))

    return report


def non_served_users(assignment: Assignment, scenario: Scenario) -> list[int]:
    """Ids of users holding no allocation, ascending."""
    served = assignment.served_users()
    return sorted(u.id for u in scenario.users if u.id not in served)


def write_assignment_csv(assignment: Assignment, channel: ChannelState,
                         path) -> None:
    """Dump as CSV with header bs_id,user_id,n_rbs,rate_bps."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bs_id", "user_id", "n_rbs", "rate_bps"])
        for (bs_id, user_id), n in sorted(assignment.alloc.items()):
            bi = channel.bs_index[bs_id]
            uj = channel.user_index[user_id]
            rate = n * float(channel.unit_rate[bi, uj])
            writer.writerow([bs_id, user_id, n, repr(rate)])
