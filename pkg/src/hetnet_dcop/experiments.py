"""Experiment drivers: scenario sweeps, metric rows, summaries and CSV output.

Five experiment kinds mirror the headline result families: solution quality
per candidate cap (table1), solver runtime growth (runtime), non-served
user counts (nonserved), the per-user rate distribution (cdf) and total
rate against the macro station's RB budget (macro_rb). Replications and
parameter points derive their seeds from the master seed, so serial reruns
reproduce the same rows.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .assignment import non_served_users, per_user_rate, total_rate
from .baselines import max_sinr_solve
from .dcop import build_model
from .mcsolver import GeometricAnnealing, SolverConfig, solve
from .netmodel import compute_channel
from .scenarios import generate_scenario

ALGO_MC = "mc"
ALGO_MAX_SINR = "maxsinr"

KINDS = ("table1", "runtime", "nonserved", "cdf", "macro_rb")
_KIND_IDS = {kind: i + 1 for i, kind in enumerate(KINDS)}
_STREAM_SCENARIO, _STREAM_FADING, _STREAM_CHAIN = 1, 2, 3


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    user_counts: tuple[int, ...]
    etas: tuple[int, ...]
    replications: int = 10
    master_seed: int = 0
    macro_rbs_grid: tuple[int, ...] = (200,)
    algos: tuple[str, ...] = (ALGO_MC,)
    steps: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if any(n <= 0 for n in self.user_counts):
            raise ValueError("user counts must be positive")
        if any(e < 1 for e in self.etas):
            raise ValueError("etas must be >= 1")

    @classmethod
    def preset(cls, kind: str, *, replications: int = 10, master_seed: int = 0,
               steps: int | None = None, user_counts=None, etas=None,
               macro_rbs_grid=None) -> "ExperimentSpec":
        defaults = {
            "table1": dict(user_counts=(50, 80, 100), etas=(1, 2, 3, 4, 5),
                           algos=(ALGO_MC,)),
            "runtime": dict(user_counts=tuple(range(20, 101, 10)),
                            etas=(1, 2, 3, 4, 5), algos=(ALGO_MC,)),
            "nonserved": dict(user_counts=(120, 160, 200, 240), etas=(3,),
                              algos=(ALGO_MC, ALGO_MAX_SINR)),
            "cdf": dict(user_counts=(200,), etas=(3,),
                        algos=(ALGO_MC, ALGO_MAX_SINR)),
            "macro_rb": dict(user_counts=(200,), etas=(3,),
                             macro_rbs_grid=(150, 175, 200, 225, 250),
                             algos=(ALGO_MC, ALGO_MAX_SINR)),
        }
        if kind not in defaults:
            raise ValueError(f"unknown experiment kind {kind!r}")
        params = dict(defaults[kind])
        if user_counts is not None:
            params["user_counts"] = tuple(user_counts)
        if etas is not None:
            params["etas"] = tuple(etas)
        if macro_rbs_grid is not None:
            params["macro_rbs_grid"] = tuple(macro_rbs_grid)
        return cls(kind=kind, replications=replications,
                   master_seed=master_seed, steps=steps, **params)


@dataclass(frozen=True)
class MetricsRow:
    kind: str
    n_users: int
    eta: int | None  # None for algorithms without a candidate cap
    macro_rbs: int
    algo: str
    replication: int
    seed: int
    total_rate_bps: float
    avg_rate_bps: float
    non_served: int
    wall_clock_ms: float


@dataclass(frozen=True)
class UserRateRow:
    kind: str
    n_users: int
    eta: int | None
    macro_rbs: int
    algo: str
    replication: int
    seed: int
    user_id: int
    rate_bps: float


def _derived_seed(*keys: int) -> int:
    return int(np.random.SeedSequence(list(keys)).generate_state(1)[0])


def _point_rng(*keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(keys)))


def _sort_key(row):
    return (row.kind, row.n_users, row.macro_rbs,
            -1 if row.eta is None else row.eta, row.algo, row.replication,
            getattr(row, "user_id", -1))


def run_experiment(spec: ExperimentSpec):
    """Run every (replication, parameter point, algorithm) combination.

    Returns MetricsRow items, except for the cdf kind which yields one
    UserRateRow per user per algorithm. Rows come back sorted by their
    parameter-point keys.
    """
    kid = _KIND_IDS[spec.kind]
    rows = []
    for rep in range(spec.replications):
        for n_users in spec.user_counts:
            for macro_rbs in spec.macro_rbs_grid:
                base = (spec.master_seed, kid, n_users, macro_rbs, rep)
                scenario_seed = _derived_seed(*base, _STREAM_SCENARIO)
                scenario = generate_scenario(scenario_seed, n_users,
                                             macro_rbs=macro_rbs)
                channel = compute_channel(
                    scenario, _point_rng(*base, _STREAM_FADING))
                for algo in spec.algos:
                    if algo == ALGO_MC:
                        for eta in spec.etas:
                            model = build_model(scenario, channel, eta)
                            config = SolverConfig(
                                seed=_derived_seed(*base, eta, _STREAM_CHAIN),
                                steps=spec.steps,
                                annealing=GeometricAnnealing())
                            result, stats = solve(model, config)
                            rows.extend(_emit(spec, scenario, channel, result,
                                              eta, macro_rbs, rep,
                                              scenario_seed, algo,
                                              stats.wall_clock_ms))
                    elif algo == ALGO_MAX_SINR:
                        t0 = time.perf_counter()
                        result = max_sinr_solve(scenario, channel)
                        wall_ms = (time.perf_counter() - t0) * 1e3
                        rows.extend(_emit(spec, scenario, channel, result,
                                          None, macro_rbs, rep, scenario_seed,
                                          algo, wall_ms))
                    else:
                        raise ValueError(f"unknown algorithm {algo!r}")
    rows.sort(key=_sort_key)
    return rows


def _emit(spec, scenario, channel, result, eta, macro_rbs, rep, seed, algo,
          wall_ms):
    n_users = len(scenario.users)
    if spec.kind == "cdf":
        rates = per_user_rate(result, scenario, channel)
        return [UserRateRow(kind=spec.kind, n_users=n_users, eta=eta,
                            macro_rbs=macro_rbs, algo=algo, replication=rep,
                            seed=seed, user_id=uid, rate_bps=rates[uid])
                for uid in sorted(rates)]
    total = total_rate(result, channel)
    return [MetricsRow(kind=spec.kind, n_users=n_users, eta=eta,
                       macro_rbs=macro_rbs, algo=algo, replication=rep,
                       seed=seed, total_rate_bps=total,
                       avg_rate_bps=total / n_users if n_users else 0.0,
                       non_served=len(non_served_users(result, scenario)),
                       wall_clock_ms=wall_ms)]


@dataclass(frozen=True)
class SummaryRow:
    kind: str
    n_users: int
    eta: int | None
    macro_rbs: int
    algo: str
    n_rows: int
    mean_total_rate_bps: float
    std_total_rate_bps: float
    mean_avg_rate_bps: float
    std_avg_rate_bps: float
    mean_non_served: float
    std_non_served: float
    mean_wall_clock_ms: float
    std_wall_clock_ms: float


def _mean_std(values):
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def summarize(rows) -> list[SummaryRow]:
    """Group metric rows by parameter point and algorithm; sample stddevs."""
    if not rows:
        raise ValueError("no rows to summarize")
    groups: dict[tuple, list[MetricsRow]] = {}
    for row in rows:
        key = (row.kind, row.n_users, row.eta, row.macro_rbs, row.algo)
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[3],
                                             -1 if k[2] is None else k[2], k[4])):
        bucket = groups[key]
        mt, st = _mean_std([r.total_rate_bps for r in bucket])
        ma, sa = _mean_std([r.avg_rate_bps for r in bucket])
        mn, sn = _mean_std([r.non_served for r in bucket])
        mw, sw = _mean_std([r.wall_clock_ms for r in bucket])
        out.append(SummaryRow(kind=key[0], n_users=key[1], eta=key[2],
                              macro_rbs=key[3], algo=key[4], n_rows=len(bucket),
                              mean_total_rate_bps=mt, std_total_rate_bps=st,
                              mean_avg_rate_bps=ma, std_avg_rate_bps=sa,
                              mean_non_served=mn, std_non_served=sn,
                              mean_wall_clock_ms=mw, std_wall_clock_ms=sw))
    return out


@dataclass(frozen=True)
class RateCdfSummary:
    algo: str
    n_rows: int
    mean_fraction_below_qos: float
    std_fraction_below_qos: float
    mean_rate_bps: float


def summarize_user_rates(rows, qos_threshold: float) -> list[RateCdfSummary]:
    """Per-algorithm fraction of users below the QoS rate, across replications."""
    per_rep: dict[tuple[str, int], list[float]] = {}
    all_rates: dict[str, list[float]] = {}
    for row in rows:
        per_rep.setdefault((row.algo, row.replication), []).append(row.rate_bps)
        all_rates.setdefault(row.algo, []).append(row.rate_bps)
    out = []
    for algo in sorted(all_rates):
        fracs = [sum(1 for r in rates if r < qos_threshold) / len(rates)
                 for (a, _), rates in sorted(per_rep.items()) if a == algo]
        mean, std = _mean_std(fracs)
        out.append(RateCdfSummary(algo=algo, n_rows=len(all_rates[algo]),
                                  mean_fraction_below_qos=mean,
                                  std_fraction_below_qos=std,
                                  mean_rate_bps=statistics.fmean(all_rates[algo])))
    return out


def _write_dataclass_csv(rows, path) -> None:
    names = [f.name for f in fields(rows[0])]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in rows:
            writer.writerow(["" if (v := getattr(row, name)) is None
                             else (repr(v) if isinstance(v, float) else v)
                             for name in names])


def write_rows_csv(rows, path) -> None:
    """Write metric or user-rate rows; floats use repr for exact round trips."""
    if not rows:
        raise ValueError("no rows to write")
    _write_dataclass_csv(rows, path)


def run_and_report(spec: ExperimentSpec, out_dir, figures: bool = True) -> dict:
    """Run the experiment and write CSVs (plus figures) under out_dir.

    Returns a dict of the artifacts written, keyed by role.
    """
    from . import plots  # deferred: pulls in matplotlib

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = run_experiment(spec)
    artifacts: dict[str, Path] = {}
    rows_path = out_dir / f"{spec.kind}.csv"
    write_rows_csv(rows, rows_path)
    artifacts["rows"] = rows_path
    if spec.kind == "cdf":
        summary = summarize_user_rates(rows, qos_threshold=3.0)
        summary_path = out_dir / f"{spec.kind}_summary.csv"
        _write_dataclass_csv(summary, summary_path)
    else:
        summary = summarize(rows)
        summary_path = out_dir / f"{spec.kind}_summary.csv"
        _write_dataclass_csv(summary, summary_path)
    artifacts["summary"] = summary_path
    if figures:
        fig_path = out_dir / f"{spec.kind}.png"
        plots.render_experiment(spec.kind, rows, summary, fig_path)
        artifacts["figure"] = fig_path
    return artifacts
