"""Scenario generation and persistence.

The generated layout follows the standard three-tier setup: one macro
station fixed at the center of a 1000 m x 1000 m square, five pico and ten
femto stations placed uniformly at random, transmit powers 46/35/20 dBm,
macro-tier path loss 34+40*log10(d) and femto 37+30*log10(d), RB budgets
200/100/50 and a uniform 3 bit/s rate requirement.

Scenario files are JSON trees mirroring the Scenario type exactly
(distances in meters, powers in dBm, rates in bit/s); a version field is
required. See the README for the schema.
"""

from __future__ import annotations

import json

import numpy as np

from .netmodel import (
    BaseStation,
    RadioParams,
    Scenario,
    Tier,
    User,
    default_radio,
)

SCENARIO_FORMAT_VERSION = 1

MACRO_TIER = Tier(id=1, tx_power_dbm=46.0, pathloss_a=34.0, pathloss_b=40.0)
PICO_TIER = Tier(id=2, tx_power_dbm=35.0, pathloss_a=34.0, pathloss_b=40.0)
FEMTO_TIER = Tier(id=3, tx_power_dbm=20.0, pathloss_a=37.0, pathloss_b=30.0)


def generate_scenario(seed: int, n_users: int, *, macro_rbs: int = 200,
                      pico_rbs: int = 100, femto_rbs: int = 50,
                      n_pico: int = 5, n_femto: int = 10,
                      area_side: float = 1000.0, qos_threshold: float = 3.0,
                      radio: RadioParams | None = None) -> Scenario:
    """Deterministic random scenario for one seed.

    Draw order is fixed (pico positions, femto positions, user positions)
    so identical arguments reproduce the scenario exactly.
    """
    if n_users < 0:
        raise ValueError("n_users must be >= 0")
    rng = np.random.default_rng(seed)
    center = area_side / 2.0
    pico_pos = rng.uniform(0.0, area_side, size=(n_pico, 2))
    femto_pos = rng.uniform(0.0, area_side, size=(n_femto, 2))
    user_pos = rng.uniform(0.0, area_side, size=(n_users, 2))

    stations = [BaseStation(id=0, tier_id=MACRO_TIER.id,
                            position=(center, center), total_rbs=macro_rbs)]
    next_id = 1
    for row in pico_pos:
        stations.append(BaseStation(id=next_id, tier_id=PICO_TIER.id,
                                    position=(float(row[0]), float(row[1])),
                                    total_rbs=pico_rbs))
        next_id += 1
    for row in femto_pos:
        stations.append(BaseStation(id=next_id, tier_id=FEMTO_TIER.id,
                                    position=(float(row[0]), float(row[1])),
                                    total_rbs=femto_rbs))
        next_id += 1

    users = tuple(User(id=j, position=(float(user_pos[j, 0]), float(user_pos[j, 1])),
                       rate_requirement=qos_threshold)
                  for j in range(n_users))
    return Scenario(
        area=(area_side, area_side),
        tiers=(MACRO_TIER, PICO_TIER, FEMTO_TIER),
        base_stations=tuple(stations),
        users=users,
        radio=radio if radio is not None else default_radio(),
        qos_threshold=qos_threshold,
        rng_seed=seed,
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "version": SCENARIO_FORMAT_VERSION,
        "area": list(scenario.area),
        "qos_threshold_bps": scenario.qos_threshold,
        "rng_seed": scenario.rng_seed,
        "radio": {
            "rb_bandwidth_hz": scenario.radio.rb_bandwidth,
            "rb_time_s": scenario.radio.rb_time,
            "scheduling_interval_s": scenario.radio.scheduling_interval,
            "noise_power_w": scenario.radio.noise_power_w,
            "rate_scale": scenario.radio.rate_scale,
        },
        "tiers": [
            {"id": t.id, "tx_power_dbm": t.tx_power_dbm,
             "pathloss_a": t.pathloss_a, "pathloss_b": t.pathloss_b}
            for t in scenario.tiers
        ],
        "base_stations": [
            {"id": b.id, "tier_id": b.tier_id, "position": list(b.position),
             "total_rbs": b.total_rbs}
            for b in scenario.base_stations
        ],
        "users": [
            {"id": u.id, "position": list(u.position),
             "rate_requirement_bps": u.rate_requirement}
            for u in scenario.users
        ],
    }


def scenario_from_dict(data: dict) -> Scenario:
    version = data.get("version")
    if version != SCENARIO_FORMAT_VERSION:
        raise ValueError(f"unsupported scenario version {version!r} "
                         f"(expected {SCENARIO_FORMAT_VERSION})")
    try:
        radio = RadioParams(
            rb_bandwidth=data["radio"]["rb_bandwidth_hz"],
            rb_time=data["radio"]["rb_time_s"],
            scheduling_interval=data["radio"]["scheduling_interval_s"],
            noise_power_w=data["radio"]["noise_power_w"],
            rate_scale=data["radio"]["rate_scale"],
        )
        qos = data["qos_threshold_bps"]
        tiers = tuple(Tier(id=t["id"], tx_power_dbm=t["tx_power_dbm"],
                           pathloss_a=t["pathloss_a"], pathloss_b=t["pathloss_b"])
                      for t in data["tiers"])
        stations = tuple(BaseStation(id=b["id"], tier_id=b["tier_id"],
                                     position=tuple(b["position"]),
                                     total_rbs=b["total_rbs"])
                         for b in data["base_stations"])
        users = tuple(User(id=u["id"], position=tuple(u["position"]),
                           rate_requirement=u.get("rate_requirement_bps", qos))
                      for u in data["users"])
        return Scenario(area=tuple(data["area"]), tiers=tiers,
                        base_stations=stations, users=users, radio=radio,
                        qos_threshold=qos, rng_seed=data.get("rng_seed", 0))
    except KeyError as exc:
        raise ValueError(f"scenario file missing field {exc}") from None


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from None
    return scenario_from_dict(data)
