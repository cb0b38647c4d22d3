"""Constraint-optimization encoding of user association.

Every feasible (user, candidate station) connection becomes a binary
variable owned by the station's agent, with domain {0, n} where n is the
fewest RBs meeting the user's rate requirement. A per-agent capacity
constraint rewards the served rate (or absorbs to a violation on overload)
and a per-user constraint forbids double association. Maximizing the summed
rewards therefore maximizes the total delivered rate over feasible states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import Assignment
from .netmodel import ChannelState, Scenario

INTER = "inter"  # per-user single-association constraint
INTRA = "intra"  # per-agent capacity constraint


@dataclass(frozen=True)
class Reward:
    """Extended-real constraint reward: finite bit/s or an absorbing violation."""

    value: float
    is_violated: bool = False

    @classmethod
    def finite(cls, value: float) -> "Reward":
        return cls(float(value), False)

    def __add__(self, other):
        if not isinstance(other, Reward):
            return NotImplemented
        if self.is_violated or other.is_violated:
            return VIOLATED
        return Reward(self.value + other.value, False)


VIOLATED = Reward(float("-inf"), True)


@dataclass(frozen=True)
class Variable:
    """One candidate connection; assigning n_active RBs switches it on."""

    index: int
    bs_id: int
    user_id: int
    bs_pos: int    # row in the channel matrices
    user_pos: int  # column in the channel matrices
    n_active: int
    rate: float    # bit/s delivered when on: n_active * unit_rate

    @property
    def domain(self) -> tuple[int, int]:
        return (0, self.n_active)


@dataclass(frozen=True)
class Constraint:
    """Scoped reward over variable indices.

    kind INTRA: anchor is a bs_id and capacity its RB budget; the scope is
    every variable of that agent. kind INTER: anchor is a user_id; the scope
    is every variable of that user (only built when there are at least two).
    """

    kind: str
    anchor: int
    scope: tuple[int, ...]
    capacity: int | None = None


@dataclass(eq=False)
class DcopModel:
    """The agent/variable/domain/constraint bundle plus solver-side arrays."""

    scenario: Scenario
    channel: ChannelState
    eta: int
    agents: tuple[int, ...]
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]

    var_bs_pos: np.ndarray = field(init=False, repr=False)
    var_user_pos: np.ndarray = field(init=False, repr=False)
    var_n: np.ndarray = field(init=False, repr=False)
    var_rate: np.ndarray = field(init=False, repr=False)
    agent_capacity: np.ndarray = field(init=False, repr=False)
    agent_scopes: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.variables)
        self.var_bs_pos = np.array([v.bs_pos for v in self.variables], dtype=np.int64).reshape(n)
        self.var_user_pos = np.array([v.user_pos for v in self.variables], dtype=np.int64).reshape(n)
        self.var_n = np.array([v.n_active for v in self.variables], dtype=np.int64).reshape(n)
        self.var_rate = np.array([v.rate for v in self.variables], dtype=float).reshape(n)
        caps = {b.id: b.total_rbs for b in self.scenario.base_stations}
        self.agent_capacity = np.array([caps[a] for a in self.agents], dtype=np.int64)
        self.agent_scopes = tuple(c.scope for c in self.intra_constraints())

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def state_count(self) -> int:
        return 1 << self.n_variables

    def intra_constraints(self) -> list[Constraint]:
        return [c for c in self.constraints if c.kind == INTRA]

    def inter_constraints(self) -> list[Constraint]:
        return [c for c in self.constraints if c.kind == INTER]

    def induced_assignment(self, values) -> Assignment:
        """Assignment holding one entry per switched-on variable."""
        alloc: dict[tuple[int, int], int] = {}
        for var, val in zip(self.variables, values):
            if val:
                alloc[(var.bs_id, var.user_id)] = var.n_active
        return Assignment(alloc)

    def describe(self) -> str:
        """Plain-text report of agents, variables with domains and constraints."""
        lines = [f"agents: {len(self.agents)}  variables: {self.n_variables}  "
                 f"constraints: {len(self.constraints)}  eta: {self.eta}"]
        for c in self.intra_constraints():
            lines.append(f"agent bs={c.anchor} capacity={c.capacity} "
                         f"variables={len(c.scope)}")
            for k in c.scope:
                v = self.variables[k]
                lines.append(f"  var[{k}] bs={v.bs_id} user={v.user_id} "
                             f"domain={{0,{v.n_active}}} rate={v.rate:g}")
        for c in self.inter_constraints():
            pairs = ",".join(f"(bs={self.variables[k].bs_id})" for k in c.scope)
            lines.append(f"single-association user={c.anchor} "
                         f"scope={list(c.scope)} {pairs}")
        return "\n".join(lines) + "\n"


def candidate_bs(user_id: int, scenario: Scenario, channel: ChannelState) -> list[int]:
    """Stations able to meet the user's rate within their own RB budget.

    A station qualifies when its per-RB rate is positive and the minimum RB
    count fits its total budget. Returned in scenario station order; may be
    empty for unreachable users.
    """
    uj = channel.user_index[user_id]
    out = []
    for bs in scenario.base_stations:
        bi = channel.bs_index[bs.id]
        if channel.unit_rate[bi, uj] > 0 and channel.min_rbs[bi, uj] <= bs.total_rbs:
            out.append(bs.id)
    return out


def top_candidates(candidates, user_id: int, eta: int,
                   channel: ChannelState) -> list[int]:
    """At most eta candidates ordered by SINR descending, ties to lower bs id."""
    if eta < 1:
        raise ValueError("eta must be >= 1")
    uj = channel.user_index[user_id]
    ranked = sorted(candidates,
                    key=lambda b: (-float(channel.sinr[channel.bs_index[b], uj]), b))
    return ranked[:eta]


def build_model(scenario: Scenario, channel: ChannelState, eta: int) -> DcopModel:
    """Construct the model: one agent per station, one variable per retained
    candidate connection, capacity constraint per agent (agents with no
    variables keep an empty-scope one) and a single-association constraint
    per user with at least two variables."""
    if eta < 1:
        raise ValueError("eta must be >= 1")
    agents = tuple(b.id for b in scenario.base_stations)
    variables: list[Variable] = []
    per_agent: dict[int, list[int]] = {b.id: [] for b in scenario.base_stations}
    inter: list[Constraint] = []
    for user in scenario.users:
        uj = channel.user_index[user.id]
        chosen = top_candidates(candidate_bs(user.id, scenario, channel),
                                user.id, eta, channel)
        scope = []
        for bs_id in chosen:
            bi = channel.bs_index[bs_id]
            n_active = int(channel.min_rbs[bi, uj])
            rate = n_active * float(channel.unit_rate[bi, uj])
            k = len(variables)
            variables.append(Variable(index=k, bs_id=bs_id, user_id=user.id,
                                      bs_pos=bi, user_pos=uj,
                                      n_active=n_active, rate=rate))
            per_agent[bs_id].append(k)
            scope.append(k)
        if len(scope) >= 2:
            inter.append(Constraint(kind=INTER, anchor=user.id, scope=tuple(scope)))
    intra = [Constraint(kind=INTRA, anchor=b.id, scope=tuple(per_agent[b.id]),
                        capacity=b.total_rbs)
             for b in scenario.base_stations]
    return DcopModel(scenario=scenario, channel=channel, eta=eta,
                     agents=agents, variables=tuple(variables),
                     constraints=tuple(inter) + tuple(intra))


def _check_scope_values(model: DcopModel, constraint: Constraint, values) -> None:
    if len(values) != len(constraint.scope):
        raise ValueError("values must align with the constraint scope")
    for k, val in zip(constraint.scope, values):
        if val not in (0, model.variables[k].n_active):
            raise ValueError(f"value {val!r} outside domain of variable {k}")


def constraint_reward(model: DcopModel, constraint: Constraint, values) -> Reward:
    """Reward of one constraint under scope-aligned domain values."""
    _check_scope_values(model, constraint, values)
    if constraint.kind == INTER:
        if sum(1 for v in values if v) >= 2:
            return VIOLATED
        return Reward.finite(0.0)
    load = sum(values)
    if load > constraint.capacity:
        return VIOLATED
    sub = 0.0
    for k, val in zip(constraint.scope, values):
        if val:
            sub += float(model.var_rate[k])
    return Reward.finite(sub)


def model_utility(model: DcopModel, values) -> Reward:
    """Sum of all constraint rewards for a full value vector (absorbing)."""
    values = list(values)
    if len(values) != model.n_variables:
        raise ValueError("values must cover every variable")
    for c in model.inter_constraints():
        if sum(1 for k in c.scope if values[k]) >= 2:
            return VIOLATED
    total = 0.0
    for c in model.intra_constraints():
        load = sum(values[k] for k in c.scope)
        if load > c.capacity:
            return VIOLATED
        sub = 0.0
        for k in c.scope:
            if values[k]:
                sub += float(model.var_rate[k])
        total += sub
    return Reward.finite(total)


def state_feasible(model: DcopModel, active) -> bool:
    """Feasibility of an on/off vector without computing the utility."""
    for c in model.inter_constraints():
        if sum(1 for k in c.scope if active[k]) >= 2:
            return False
    for c in model.intra_constraints():
        if sum(int(model.var_n[k]) for k in c.scope if active[k]) > c.capacity:
            return False
    return True


def state_utility(model: DcopModel, active) -> float:
    """Canonical total rate of a feasible on/off vector.

    Sums per agent in agent order, each agent left to right over its scope;
    every exact-equality path in this package (model_utility, total_rate,
    the chain cache and the enumeration oracles) reproduces this order.
    """
    total = 0.0
    for scope in model.agent_scopes:
        sub = 0.0
        for k in scope:
            if active[k]:
                sub += float(model.var_rate[k])
        total += sub
    return total


def enumerate_state_blocks(model: DcopModel, block_size: int = 1 << 16):
    """Yield (codes, active, feasible, utility) over the full state space.

    codes are the state indices (variable 0 is the least significant bit),
    active the on/off matrix for the block, and utility the canonical rate
    (meaningless where infeasible). Vectorized but bit-identical to
    state_utility thanks to matching accumulation order.
    """
    n = model.n_variables
    total = 1 << n
    shifts = np.arange(n, dtype=np.uint64)
    inter_scopes = [np.array(c.scope, dtype=np.int64)
                    for c in model.inter_constraints()]
    for start in range(0, total, block_size):
        stop = min(start + block_size, total)
        codes = np.arange(start, stop, dtype=np.uint64)
        active = ((codes[:, None] >> shifts[None, :]) & np.uint64(1)).astype(bool)
        feasible = np.ones(stop - start, dtype=bool)
        for scope in inter_scopes:
            feasible &= active[:, scope].sum(axis=1) <= 1
        for i, scope in enumerate(model.agent_scopes):
            if not scope:
                continue
            idx = np.array(scope, dtype=np.int64)
            load = active[:, idx] @ model.var_n[idx]
            feasible &= load <= model.agent_capacity[i]
        utility = np.zeros(stop - start, dtype=float)
        for scope in model.agent_scopes:
            sub = np.zeros(stop - start, dtype=float)
            for k in scope:
                sub += active[:, k] * float(model.var_rate[k])
            utility += sub
        yield codes, active, feasible, utility
