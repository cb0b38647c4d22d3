"""Physical layer of a multi-tier cellular network.

Geometry, log-distance path loss, unit-mean exponential fading, SINR with
per-interferer received powers, per-resource-block rates, and the minimum
RB counts that drive every solver in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MIN_DISTANCE_M = 1.0  # path loss is clamped below this to stay nonnegative
DEFAULT_NOISE_DBM = -111.45
INFEASIBLE = math.inf  # sentinel in min-RB matrices: pair can never meet QoS


def dbm_to_watts(power_dbm: float) -> float:
    return 10.0 ** ((power_dbm - 30.0) / 10.0)


def watts_to_dbm(power_w: float) -> float:
    return 10.0 * math.log10(power_w) + 30.0


@dataclass(frozen=True)
class Tier:
    """One class of base stations sharing transmit power and propagation law.

    Path loss at distance d (meters) is ``pathloss_a + pathloss_b*log10(d)``
    in dB, e.g. (34, 40) for macro/pico and (37, 30) for femto cells.
    """

    id: int
    tx_power_dbm: float
    pathloss_a: float
    pathloss_b: float

    def __post_init__(self):
        if not math.isfinite(self.tx_power_dbm):
            raise ValueError("tx_power_dbm must be finite")
        if self.pathloss_b <= 0:
            raise ValueError("pathloss_b must be > 0")


@dataclass(frozen=True)
class BaseStation:
    id: int
    tier_id: int
    position: tuple[float, float]
    total_rbs: int

    def __post_init__(self):
        if self.total_rbs < 0:
            raise ValueError("total_rbs must be >= 0")


@dataclass(frozen=True)
class User:
    id: int
    position: tuple[float, float]
    rate_requirement: float  # bit/s

    def __post_init__(self):
        if self.rate_requirement <= 0:
            raise ValueError("rate_requirement must be > 0")


@dataclass(frozen=True)
class RadioParams:
    """Radio constants shared by all resource blocks.

    ``noise_power_w`` is the composite noise term added to the interference
    sum (linear watts). ``rate_scale`` multiplies spectral efficiency to get
    the per-RB rate in bit/s. The default 0.7 puts generated scenarios in
    the capacity-strained regime where association quality matters (typical
    minimum RB demand close to the total budget); 1.0 reports rates equal
    to spectral efficiency, and :meth:`with_literal_rate` switches to the
    physical bandwidth*time/interval factor.
    """

    rb_bandwidth: float = 180e3      # Hz
    rb_time: float = 0.5e-3          # s
    scheduling_interval: float = 1.0  # s
    noise_power_w: float = dbm_to_watts(DEFAULT_NOISE_DBM)
    rate_scale: float = 0.7

    def __post_init__(self):
        for name in ("rb_bandwidth", "rb_time", "scheduling_interval",
                     "noise_power_w", "rate_scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    def literal_rate_scale(self) -> float:
        """The bandwidth*time/interval factor of the physical per-RB rate."""
        return self.rb_bandwidth * self.rb_time / self.scheduling_interval

    def with_literal_rate(self) -> "RadioParams":
        return RadioParams(self.rb_bandwidth, self.rb_time,
                           self.scheduling_interval, self.noise_power_w,
                           self.literal_rate_scale())


def default_radio() -> RadioParams:
    return RadioParams()


@dataclass(frozen=True)
class Scenario:
    """A static snapshot of the network: stations, users and radio constants."""

    area: tuple[float, float]
    tiers: tuple[Tier, ...]
    base_stations: tuple[BaseStation, ...]
    users: tuple[User, ...]
    radio: RadioParams = field(default_factory=default_radio)
    qos_threshold: float = 3.0  # bit/s, default per-user rate requirement
    rng_seed: int = 0

    def __post_init__(self):
        tier_ids = [t.id for t in self.tiers]
        if len(set(tier_ids)) != len(tier_ids):
            raise ValueError("duplicate tier ids")
        bs_ids = [b.id for b in self.base_stations]
        if len(set(bs_ids)) != len(bs_ids):
            raise ValueError("duplicate base station ids")
        user_ids = [u.id for u in self.users]
        if len(set(user_ids)) != len(user_ids):
            raise ValueError("duplicate user ids")
        known = set(tier_ids)
        w, h = self.area
        for bs in self.base_stations:
            if bs.tier_id not in known:
                raise ValueError(f"base station {bs.id}: unknown tier {bs.tier_id}")
            x, y = bs.position
            if not (0 <= x <= w and 0 <= y <= h):
                raise ValueError(f"base station {bs.id} outside area")
        if self.qos_threshold <= 0:
            raise ValueError("qos_threshold must be > 0")

    @cached_property
    def tier_by_id(self) -> dict[int, Tier]:
        return {t.id: t for t in self.tiers}

    @cached_property
    def bs_index(self) -> dict[int, int]:
        return {b.id: i for i, b in enumerate(self.base_stations)}

    @cached_property
    def user_index(self) -> dict[int, int]:
        return {u.id: j for j, u in enumerate(self.users)}

    def tier_of(self, bs: BaseStation) -> Tier:
        return self.tier_by_id[bs.tier_id]


@dataclass
class ChannelState:
    """Per-(station, user) radio quantities for one fading snapshot.

    Matrices are indexed [station, user] in scenario order. ``gain`` is the
    received power in watts (transmit power, path loss and fading folded in),
    so interference at a user is the column sum over the other stations.
    ``min_rbs`` holds the fewest RBs meeting the user's rate requirement,
    with ``INFEASIBLE`` (inf) where the per-RB rate is zero.
    """

    bs_ids: tuple[int, ...]
    user_ids: tuple[int, ...]
    gain: np.ndarray
    sinr: np.ndarray
    unit_rate: np.ndarray
    min_rbs: np.ndarray

    @cached_property
    def bs_index(self) -> dict[int, int]:
        return {b: i for i, b in enumerate(self.bs_ids)}

    @cached_property
    def user_index(self) -> dict[int, int]:
        return {u: j for j, u in enumerate(self.user_ids)}

    @classmethod
    def from_unit_rates(cls, scenario: Scenario, unit_rate: np.ndarray,
                        sinr: np.ndarray | None = None,
                        gain: np.ndarray | None = None) -> "ChannelState":
        """Build a channel directly from a per-RB rate matrix (test helper)."""
        unit_rate = np.asarray(unit_rate, dtype=float)
        nb, nu = len(scenario.base_stations), len(scenario.users)
        if unit_rate.shape != (nb, nu):
            raise ValueError(f"unit_rate must have shape ({nb}, {nu})")
        if sinr is None:
            sinr = unit_rate.copy()
        if gain is None:
            gain = np.ones_like(unit_rate)
        required = np.array([u.rate_requirement for u in scenario.users],
                            dtype=float).reshape(1, nu)
        return cls(
            bs_ids=tuple(b.id for b in scenario.base_stations),
            user_ids=tuple(u.id for u in scenario.users),
            gain=np.asarray(gain, dtype=float),
            sinr=np.asarray(sinr, dtype=float),
            unit_rate=unit_rate,
            min_rbs=min_rbs_needed(unit_rate, required),
        )


def path_loss(distance_m: float, tier: Tier) -> float:
    """Log-distance path loss in dB; distances below 1 m are clamped."""
    d = max(distance_m, MIN_DISTANCE_M)
    return tier.pathloss_a + tier.pathloss_b * math.log10(d)


def draw_fading(rng: np.random.Generator, size=None):
    """Unit-mean exponential fading draw(s); scalar when size is None."""
    return rng.exponential(1.0, size)


def min_rbs_needed(unit_rate, required_rate):
    """Fewest RBs n with n*unit_rate >= required_rate, INFEASIBLE when rate is 0.

    The naive ceil of the ratio can land one off in float arithmetic near
    exact multiples; the result is nudged so that both n*u >= r and
    (n-1)*u < r hold under IEEE comparison.
    """
    u = np.asarray(unit_rate, dtype=float)
    r = np.asarray(required_rate, dtype=float)
    pos = u > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        n = np.ceil(np.where(pos, r / np.where(pos, u, 1.0), np.inf))
        n = np.where(pos, n, INFEASIBLE)
        over = pos & (n > 1) & ((n - 1.0) * u >= r)
        n = np.where(over, n - 1.0, n)
        under = pos & (n * u < r)
        n = np.where(under, n + 1.0, n)
    if np.ndim(unit_rate) == 0 and np.ndim(required_rate) == 0:
        return float(n)
    return n


def compute_channel(scenario: Scenario, rng: np.random.Generator) -> ChannelState:
    """Derive gains, SINR, per-RB rates and minimum RB counts for one snapshot.

    Fading is drawn once per call (static association snapshot); pass a
    freshly seeded generator for a reproducible channel.
    """
    bss = scenario.base_stations
    users = scenario.users
    nb, nu = len(bss), len(users)
    bs_pos = np.array([b.position for b in bss], dtype=float).reshape(nb, 2)
    user_pos = np.array([u.position for u in users], dtype=float).reshape(nu, 2)
    dist = np.linalg.norm(bs_pos[:, None, :] - user_pos[None, :, :], axis=2)
    dist = np.maximum(dist, MIN_DISTANCE_M)

    tiers = [scenario.tier_of(b) for b in bss]
    offset = np.array([t.pathloss_a for t in tiers], dtype=float).reshape(nb, 1)
    slope = np.array([t.pathloss_b for t in tiers], dtype=float).reshape(nb, 1)
    loss_db = offset + slope * np.log10(dist)
    tx_w = np.array([dbm_to_watts(t.tx_power_dbm) for t in tiers],
                    dtype=float).reshape(nb, 1)

    fade = draw_fading(rng, size=(nb, nu))
    gain = tx_w * 10.0 ** (-loss_db / 10.0) * fade

    total = gain.sum(axis=0, keepdims=True)
    sinr = gain / (total - gain + scenario.radio.noise_power_w)
    unit_rate = scenario.radio.rate_scale * np.log2(1.0 + sinr)
    required = np.array([u.rate_requirement for u in users],
                        dtype=float).reshape(1, nu)
    return ChannelState(
        bs_ids=tuple(b.id for b in bss),
        user_ids=tuple(u.id for u in users),
        gain=gain,
        sinr=sinr,
        unit_rate=unit_rate,
        min_rbs=min_rbs_needed(unit_rate, required),
    )
