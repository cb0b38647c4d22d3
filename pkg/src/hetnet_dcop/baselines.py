"""Centralized Max-SINR baseline and the exhaustive-search oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assignment import Assignment
from .dcop import DcopModel, enumerate_state_blocks, model_utility
from .netmodel import ChannelState, Scenario

MAX_BRUTE_FORCE_VARIABLES = 24


def max_sinr_attachments(scenario: Scenario, channel: ChannelState) -> dict[int, int]:
    """Each user's argmax-SINR station (ties to the lower station id).

    Users with zero per-RB rate everywhere stay unattached.
    """
    attach: dict[int, int] = {}
    for user in scenario.users:
        uj = channel.user_index[user.id]
        best_bs = None
        best_sinr = -math.inf
        for bs in scenario.base_stations:
            bi = channel.bs_index[bs.id]
            if channel.unit_rate[bi, uj] <= 0:
                continue
            s = float(channel.sinr[bi, uj])
            if s > best_sinr or (s == best_sinr and best_bs is not None
                                 and bs.id < best_bs):
                best_sinr = s
                best_bs = bs.id
        if best_bs is not None:
            attach[user.id] = best_bs
    return attach


def max_sinr_solve(scenario: Scenario, channel: ChannelState) -> Assignment:
    """Attach by SINR, then each station grants minimum RB counts greedily.

    Attached users are granted in descending SINR (ties to the lower user
    id); a user whose minimum count does not fit the remaining budget is
    skipped and ends up non-served. The result is always capacity- and
    uniqueness-feasible.
    """
    attach = max_sinr_attachments(scenario, channel)
    per_bs: dict[int, list[int]] = {}
    for user_id, bs_id in attach.items():
        per_bs.setdefault(bs_id, []).append(user_id)

    result = Assignment()
    for bs in scenario.base_stations:
        queue = per_bs.get(bs.id, [])
        bi = channel.bs_index[bs.id]
        queue.sort(key=lambda uid: (-float(channel.sinr[bi, channel.user_index[uid]]),
                                    uid))
        remaining = bs.total_rbs
        for user_id in queue:
            need = channel.min_rbs[bi, channel.user_index[user_id]]
            if math.isfinite(need) and need <= remaining:
                result.grant(bs.id, user_id, int(need))
                remaining -= int(need)
    return result


@dataclass
class OracleResult:
    """Exhaustive-search outcome over a model's full state space."""

    optimal_assignment: Assignment
    optimal_utility: float
    states_enumerated: int


def brute_force_solve(model: DcopModel) -> OracleResult:
    """Enumerate every domain-value combination and keep the utility maximum.

    Infeasible states are skipped; ties break toward the lexicographically
    smallest value vector. Refuses models beyond 2^24 states.
    """
    n = model.n_variables
    if n > MAX_BRUTE_FORCE_VARIABLES:
        raise ValueError(f"brute force limited to {MAX_BRUTE_FORCE_VARIABLES} "
                         f"variables, got {n}")
    best_utility = -math.inf
    best_key = None
    best_active = np.zeros(n, dtype=bool)
    # lexicographic key: variable 0 is the most significant digit
    key_weights = np.uint64(1) << np.arange(n - 1, -1, -1, dtype=np.uint64)
    for _, active, feasible, utility in enumerate_state_blocks(model):
        rows = np.flatnonzero(feasible)
        if rows.size == 0:
            continue
        utils = utility[rows]
        top = float(utils.max())
        if top < best_utility:
            continue
        contenders = rows[utils == top]
        keys = active[contenders].astype(np.uint64) @ key_weights
        pick = int(np.argmin(keys))
        key = int(keys[pick])
        if top > best_utility or key < best_key:
            best_utility = top
            best_key = key
            best_active = active[contenders[pick]].copy()
    values = [int(model.var_n[k]) if best_active[k] else 0 for k in range(n)]
    exact = model_utility(model, values)
    return OracleResult(optimal_assignment=model.induced_assignment(best_active),
                        optimal_utility=exact.value,
                        states_enumerated=1 << n)
