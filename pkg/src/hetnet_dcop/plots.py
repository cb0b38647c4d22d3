"""Figure rendering for experiment reports.

One figure per experiment kind, saved next to the CSV output. Uses the Agg
backend so the CLI works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_ALGO_LABELS = {"mc": "Markov chain", "maxsinr": "Max-SINR"}


def _label(algo):
    return _ALGO_LABELS.get(algo, algo)


def render_experiment(kind: str, rows, summary, path) -> None:
    if kind == "runtime":
        _plot_runtime(summary, path)
    elif kind == "table1":
        _plot_avg_rate(summary, path)
    elif kind == "nonserved":
        _plot_nonserved(summary, path)
    elif kind == "cdf":
        _plot_cdf(rows, path)
    elif kind == "macro_rb":
        _plot_macro_rb(summary, path)
    else:
        raise ValueError(f"no figure defined for experiment kind {kind!r}")


def _plot_runtime(summary, path):
    fig, ax = plt.subplots(figsize=(7, 5))
    etas = sorted({s.eta for s in summary if s.eta is not None})
    for eta in etas:
        pts = sorted((s.n_users, s.mean_wall_clock_ms)
                     for s in summary if s.eta == eta)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=f"candidate cap {eta}")
    ax.set_xlabel("users")
    ax.set_ylabel("solver wall clock (ms)")
    ax.set_title("Chain solver runtime")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_avg_rate(summary, path):
    fig, ax = plt.subplots(figsize=(7, 5))
    counts = sorted({s.n_users for s in summary})
    for n_users in counts:
        pts = sorted((s.eta, s.mean_avg_rate_bps)
                     for s in summary if s.n_users == n_users and s.eta is not None)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="s",
                label=f"{n_users} users")
    ax.set_xlabel("candidate cap")
    ax.set_ylabel("average rate per user (bit/s)")
    ax.set_title("Average user rate vs candidate cap")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_nonserved(summary, path):
    fig, ax = plt.subplots(figsize=(7, 5))
    algos = sorted({s.algo for s in summary})
    for algo in algos:
        pts = sorted((s.n_users, s.mean_non_served, s.std_non_served)
                     for s in summary if s.algo == algo)
        ax.errorbar([p[0] for p in pts], [p[1] for p in pts],
                    yerr=[p[2] for p in pts], marker="o", capsize=3,
                    label=_label(algo))
    ax.set_xlabel("users in the network")
    ax.set_ylabel("non-served users")
    ax.set_title("Non-served users")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_cdf(rows, path):
    fig, ax = plt.subplots(figsize=(7, 5))
    algos = sorted({r.algo for r in rows})
    for algo in algos:
        rates = np.sort(np.array([r.rate_bps for r in rows if r.algo == algo]))
        frac = np.arange(1, rates.size + 1) / rates.size
        ax.step(rates, frac, where="post", label=_label(algo))
    ax.axvline(3.0, color="gray", linestyle="--", alpha=0.6, label="QoS rate")
    ax.set_xlabel("achieved rate (bit/s)")
    ax.set_ylabel("fraction of users")
    ax.set_title("Rate CDF")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_macro_rb(summary, path):
    fig, ax = plt.subplots(figsize=(7, 5))
    algos = sorted({s.algo for s in summary})
    for algo in algos:
        pts = sorted((s.macro_rbs, s.mean_total_rate_bps)
                     for s in summary if s.algo == algo)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=_label(algo))
    ax.set_xlabel("RBs at the macro station")
    ax.set_ylabel("total rate (bit/s)")
    ax.set_title("Total rate vs macro RB budget")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
