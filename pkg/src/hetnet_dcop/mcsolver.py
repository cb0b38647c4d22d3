"""Markov-chain solver over feasible model states.

The smoothed objective (log-sum-exp with inverse temperature beta) has a
Gibbs-form optimizer: state probability proportional to exp(beta * rate).
A single-site Metropolis chain realizes that law: propose toggling one
uniformly chosen variable, reject proposals that would overload an agent or
double-associate a user (a local check touching only the two constraints of
the variable), and accept the rest with min(1, exp(beta * rate_change)).
Detailed balance against the Gibbs law holds step by step, and infeasible
states keep probability zero because they are never entered.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .assignment import Assignment
from .dcop import DcopModel, enumerate_state_blocks, state_utility

MAX_EXACT_VARIABLES = 20  # exact enumeration is a desk-scale test oracle


def logsumexp(values, beta: float) -> float:
    """(1/beta) * log(sum(exp(beta*y))) with max-shift for overflow safety."""
    if beta <= 0:
        raise ValueError("beta must be > 0")
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("values must be nonempty")
    m = float(arr.max())
    return m + math.log(float(np.exp(beta * (arr - m)).sum())) / beta


def check_gap_bound(values, beta: float, slack: float = 1e-9) -> bool:
    """Does max(y) <= logsumexp(y, beta) <= max(y) + log(n)/beta hold?"""
    arr = np.asarray(values, dtype=float)
    top = float(arr.max())
    lse = logsumexp(arr, beta)
    upper = top + math.log(arr.size) / beta
    return (lse >= top - slack) and (lse <= upper + slack)


def holding_rate(utility_bps: float, beta: float, alpha: float = 1.0) -> float:
    """Continuous-time leave rate alpha*exp(-beta*utility) of a state.

    Only a reporting statistic: the discrete chain shares the stationary law
    regardless of alpha, so better states simply hold (1/rate) longer in the
    continuous-time reading.
    """
    return alpha * math.exp(-beta * utility_bps)


@dataclass(frozen=True)
class GeometricAnnealing:
    """beta(t) = beta0 * growth^(t // window); window defaults to steps/20.

    The default growth keeps the chain exploratory for roughly the first
    half of the run and effectively frozen at the end; faster schedules
    measurably lose served users on loaded scenarios.
    """

    beta0: float = 0.5
    growth: float = 1.12
    window: int | None = None

    def beta_at(self, step: int, total_steps: int) -> float:
        window = self.window if self.window is not None else max(1, total_steps // 20)
        return self.beta0 * self.growth ** (step // window)


DEFAULT_STEPS_PER_VARIABLE = 1500


@dataclass(frozen=True)
class SolverConfig:
    """Chain parameters; steps defaults to 1500 per variable at solve time."""

    beta: float = 1.0
    alpha: float = 1.0
    steps: int | None = None
    seed: int = 0
    annealing: GeometricAnnealing | None = None
    report_every: int | None = None

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.steps is not None and self.steps < 0:
            raise ValueError("steps must be >= 0")


@dataclass
class StationaryDistribution:
    """Exact Gibbs weights over the feasible states, keyed by value tuples."""

    table: dict[tuple[int, ...], float]

    def prob(self, values) -> float:
        return self.table.get(tuple(int(v) for v in values), 0.0)

    def total(self) -> float:
        return float(sum(self.table.values()))


def exact_stationary(model: DcopModel, beta: float) -> StationaryDistribution:
    """Enumerate feasible states and return softmax(beta * utility) over them.

    Test oracle only; refuses more than 2**MAX_EXACT_VARIABLES combinations.
    """
    if beta <= 0:
        raise ValueError("beta must be > 0")
    if model.n_variables > MAX_EXACT_VARIABLES:
        raise ValueError(
            f"state space 2^{model.n_variables} too large to enumerate "
            f"(limit 2^{MAX_EXACT_VARIABLES})")
    states: list[tuple[int, ...]] = []
    utilities: list[float] = []
    n_active = model.var_n
    for _, active, feasible, utility in enumerate_state_blocks(model):
        for row in np.flatnonzero(feasible):
            mask = active[row]
            states.append(tuple(int(n_active[k]) if mask[k] else 0
                                for k in range(model.n_variables)))
            utilities.append(float(utility[row]))
    util = np.array(utilities, dtype=float)
    weights = np.exp(beta * (util - util.max()))
    probs = weights / weights.sum()
    probs = probs / probs.sum()  # second pass pins the total to 1.0
    return StationaryDistribution(dict(zip(states, probs.tolist())))


class Chain:
    """Mutable chain state bound to one model and one random generator.

    Caches per-agent RB usage, per-user link counts and the canonical
    utility; the cache is recomputed through the same summation order as
    state_utility on every accepted move, so equality with a from-scratch
    evaluation is exact, not approximate.
    """

    def __init__(self, model: DcopModel, rng: np.random.Generator):
        self.model = model
        self.rng = rng
        n = model.n_variables
        self.active = np.zeros(n, dtype=bool)
        self.used = np.zeros(len(model.agents), dtype=np.int64)
        self.user_links = np.zeros(len(model.scenario.users), dtype=np.int64)
        self._subtotals = [0.0] * len(model.agents)
        self.utility = 0.0
        self.best_active = self.active.copy()
        self.best_utility = 0.0
        self.steps = 0
        self.accepted = 0

    def step(self, beta: float) -> bool:
        """One proposal; returns True when the state changed."""
        k = int(self.rng.integers(self.model.n_variables))
        u = float(self.rng.random())
        return self._apply(k, u, beta)

    def _apply(self, k: int, u: float, beta: float) -> bool:
        m = self.model
        self.steps += 1
        if self.active[k]:
            # switching off never violates anything; Metropolis odds only
            if u < math.exp(-beta * float(m.var_rate[k])):
                self._toggle(k)
                return True
            return False
        b = int(m.var_bs_pos[k])
        j = int(m.var_user_pos[k])
        # local feasibility: the one capacity and one association constraint
        if self.used[b] + int(m.var_n[k]) > int(m.agent_capacity[b]):
            return False
        if self.user_links[j] != 0:
            return False
        self._toggle(k)  # rate gain is nonnegative, always accepted
        return True

    def _toggle(self, k: int) -> None:
        m = self.model
        b = int(m.var_bs_pos[k])
        j = int(m.var_user_pos[k])
        if self.active[k]:
            self.active[k] = False
            self.used[b] -= int(m.var_n[k])
            self.user_links[j] -= 1
        else:
            self.active[k] = True
            self.used[b] += int(m.var_n[k])
            self.user_links[j] += 1
        sub = 0.0
        for idx in m.agent_scopes[b]:
            if self.active[idx]:
                sub += float(m.var_rate[idx])
        self._subtotals[b] = sub
        total = 0.0
        for s in self._subtotals:
            total += s
        self.utility = total
        self.accepted += 1
        if self.utility > self.best_utility:
            self.best_utility = self.utility
            self.best_active = self.active.copy()

    def values(self) -> tuple[int, ...]:
        return tuple(int(self.model.var_n[k]) if self.active[k] else 0
                     for k in range(self.model.n_variables))

    def assignment(self) -> Assignment:
        return self.model.induced_assignment(self.active)

    def best_assignment(self) -> Assignment:
        return self.model.induced_assignment(self.best_active)

    def check_consistency(self) -> None:
        """Assert caches match a from-scratch evaluation (test hook)."""
        m = self.model
        used = np.zeros_like(self.used)
        links = np.zeros_like(self.user_links)
        for k in np.flatnonzero(self.active):
            used[m.var_bs_pos[k]] += m.var_n[k]
            links[m.var_user_pos[k]] += 1
        assert np.array_equal(used, self.used), "RB usage cache out of sync"
        assert np.array_equal(links, self.user_links), "link cache out of sync"
        assert np.all(self.used <= m.agent_capacity), "capacity exceeded"
        assert np.all(self.user_links <= 1), "double association"
        assert self.utility == state_utility(m, self.active), \
            "utility cache not exactly equal to recomputation"


def transition_probability(model: DcopModel, src_values, dst_values,
                           beta: float) -> float:
    """One-step probability src -> dst of the chain kernel at fixed beta.

    Both states must be feasible; returns 0.0 unless they differ in exactly
    one variable. Self-transitions are not defined here.
    """
    src = tuple(src_values)
    dst = tuple(dst_values)
    if src == dst:
        raise ValueError("self-transition mass is not exposed")
    diff = [k for k in range(model.n_variables) if src[k] != dst[k]]
    if len(diff) != 1:
        return 0.0
    k = diff[0]
    n = model.n_variables
    delta = float(model.var_rate[k]) if dst[k] else -float(model.var_rate[k])
    return (1.0 / n) * min(1.0, math.exp(beta * delta))


@dataclass
class RunStats:
    """Per-run statistics; trace rows are (step, utility, best, accepted)."""

    steps: int
    accepted: int
    best_utility_bps: float
    wall_clock_ms: float
    final_beta: float
    trace: list[tuple[int, float, float, int]] = field(default_factory=list)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.steps if self.steps else 0.0


def write_trace_csv(stats: RunStats, path) -> None:
    """Dump the subsampled trace with header step,utility_bps,best_utility_bps,accepted."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "utility_bps", "best_utility_bps", "accepted"])
        for step, utility, best, accepted in stats.trace:
            writer.writerow([step, repr(utility), repr(best), accepted])


def solve(model: DcopModel, config: SolverConfig) -> tuple[Assignment, RunStats]:
    """Run the chain from the all-zero state and return the best state seen.

    Starts all-off (always feasible), takes config.steps transitions
    (default 1500 per variable) under a fixed or annealed beta, and returns
    the best feasible assignment observed plus run statistics. Deterministic
    for a fixed (model, config).
    """
    n = model.n_variables
    steps = (config.steps if config.steps is not None
             else DEFAULT_STEPS_PER_VARIABLE * n)
    rng = np.random.default_rng(config.seed)
    chain = Chain(model, rng)
    report_every = config.report_every or max(1, steps // 1000)
    trace: list[tuple[int, float, float, int]] = []
    beta = config.beta
    t0 = time.perf_counter()
    if n > 0:
        done = 0
        block = 4096
        while done < steps:
            count = min(block, steps - done)
            picks = rng.integers(0, n, size=count)
            draws = rng.random(count)
            for i in range(count):
                t = done + i
                if config.annealing is not None:
                    beta = config.annealing.beta_at(t, steps)
                accepted = chain._apply(int(picks[i]), float(draws[i]), beta)
                if (t + 1) % report_every == 0:
                    trace.append((t + 1, chain.utility, chain.best_utility,
                                  int(accepted)))
            done += count
    wall_ms = (time.perf_counter() - t0) * 1e3
    stats = RunStats(steps=steps, accepted=chain.accepted,
                     best_utility_bps=chain.best_utility,
                     wall_clock_ms=wall_ms, final_beta=beta, trace=trace)
    return chain.best_assignment(), stats
