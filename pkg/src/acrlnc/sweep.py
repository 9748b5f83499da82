"""Experiment grids and dataset emission.

One row per (grid point, protocol, seed), plus a seed-averaged row per
grid point (seed column holds "mean").  Output is byte-stable for a
fixed config: grid order is deterministic and floats are rendered with
repr.  Concurrent execution, when enabled, merges results back in grid
order.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import bounds as bnd
from .channels import stationary
from .protocol import fec_count
from .simulate import RunConfig, run

SWEEP_CSV_HEADER = [
    "protocol", "channel", "eps", "q", "s", "rtt", "overlap", "th",
    "seed", "slots", "throughput", "d_mean", "d_max", "complete",
]
BOUNDS_CSV_HEADER = [
    "channel", "eps", "s", "rtt", "overlap", "th", "lambda", "p_e_target",
    "p_eow", "p_retrans", "d_mean_bound", "d_max_bound", "throughput_bound",
]


@dataclass
class SweepConfig:
    base: RunConfig
    protocols: list[str] = field(default_factory=lambda: ["acrlnc", "srarq"])
    eps_grid: list[float] = field(default_factory=list)
    rtt_grid: list[int] = field(default_factory=list)
    seeds: int = 20
    seed_base: int = 0
    jobs: int = 1

    def points(self) -> list[RunConfig]:
        eps_values = self.eps_grid or [self.base.eps]
        rtt_values = self.rtt_grid or [self.base.rtt]
        out = []
        for eps in eps_values:
            for rtt in rtt_values:
                for protocol in self.protocols:
                    for i in range(self.seeds):
                        out.append(replace(
                            self.base, protocol=protocol, eps=eps, rtt=rtt,
                            seed=self.seed_base + i,
                        ))
        return out


def _run_row(cfg: RunConfig) -> dict:
    report = run(cfg).report
    q_val, s_val = "", ""
    if cfg.channel == "ge":
        s_val = cfg.s
        q_val = cfg.q if cfg.q is not None else cfg.eps * cfg.s / (1 - cfg.eps)
    return {
        "protocol": cfg.protocol,
        "channel": cfg.channel,
        "eps": cfg.eps,
        "q": q_val,
        "s": s_val,
        "rtt": cfg.rtt,
        "overlap": cfg.overlap_cap(),
        "th": "adaptive" if cfg.th_adaptive else cfg.th,
        "seed": cfg.seed,
        "slots": report.slots,
        "throughput": report.throughput,
        "d_mean": report.d_mean,
        "d_max": report.d_max,
        "complete": report.complete,
    }


def sweep(config: SweepConfig) -> list[dict]:
    points = config.points()
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_run_row, points, chunksize=4))
    else:
        rows = [_run_row(cfg) for cfg in points]

    # seed-averaged rows, appended per grid point in grid order
    grouped: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["protocol"], row["channel"], row["eps"], row["rtt"])
        grouped.setdefault(key, []).append(row)
    means = []
    for key, group in grouped.items():
        n = len(group)
        first = group[0]
        means.append({
            **first,
            "seed": "mean",
            "slots": sum(r["slots"] for r in group) / n,
            "throughput": sum(r["throughput"] for r in group) / n,
            "d_mean": sum(r["d_mean"] for r in group) / n,
            "d_max": sum(r["d_max"] for r in group) / n,
            "complete": all(r["complete"] for r in group),
        })
    return rows + means


def bounds_rows(channel: str, eps_grid: list[float], rtt_grid: list[int],
                s: float | None = None, overlap_factor: float = 2.0,
                th: float = 0.0, lam: float | None = None,
                p_e_target: float = 1e-3,
                slots_for_lambda: int | None = None) -> list[dict]:
    """Tabulate every bound over the requested grid.

    For the bursty channel the eps column carries the good-to-bad
    transition probability and the delay bounds are evaluated at the
    chain's average erasure rate.
    """
    rows = []
    for eps in eps_grid:
        for rtt in rtt_grid:
            k = rtt - 1
            overlap = max(k, int(round(overlap_factor * k)))
            if channel == "ge":
                if s is None:
                    raise ValueError("GE bounds need s")
                _, eps_eff = stationary(eps, s)
                tput = bnd.throughput_bound_ge(eps, s, rtt)
                s_val = s
            else:
                eps_eff = eps
                tput = bnd.throughput_bound_bec(eps, rtt)
                s_val = ""
            if lam is None:
                n_ref = slots_for_lambda or 0
                lam_val = min(1.0, rtt / n_ref) if n_ref else 0.0
            else:
                lam_val = lam
            params = bnd.BoundParams(
                eps=eps_eff, overlap=overlap, rtt=rtt, th=th,
                lam=lam_val, p_e_target=p_e_target,
            )
            delay = bnd.mean_delay_bound(params)
            rows.append({
                "channel": channel,
                "eps": eps,
                "s": s_val,
                "rtt": rtt,
                "overlap": overlap,
                "th": th,
                "lambda": lam_val,
                "p_e_target": p_e_target,
                "p_eow": bnd.prob_eow(eps_eff, overlap),
                "p_retrans": bnd.prob_retrans(eps_eff, eps_eff, overlap),
                "d_mean_bound": delay.combined,
                "d_max_bound": bnd.max_delay_bound(overlap, eps_eff, p_e_target)
                if 0.0 < eps_eff < 1.0 else "",
                "throughput_bound": tput,
            })
    return rows


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row[col]) for col in header])
    return buf.getvalue()


def rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=2) + "\n"


def default_m(eps: float, rtt: int) -> int:
    """FEC count the protocol itself would pick at this operating point."""
    return fec_count(eps, rtt - 1)
