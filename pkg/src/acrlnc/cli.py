"""Command-line front end.

Subcommands: simulate (one run), sweep (grid dataset), replay (trace
file), bounds (closed-form curves), golden (walkthrough check).
A JSON config file may preload any RunConfig field; explicit flags win.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .simulate import RunConfig, run, run_golden
from .sweep import (
    BOUNDS_CSV_HEADER,
    SWEEP_CSV_HEADER,
    SweepConfig,
    bounds_rows,
    rows_to_csv,
    rows_to_json,
    sweep,
)


def parse_grid(text: str, cast=float) -> list:
    """Grid syntax: comma list '0.1,0.2' or range 'lo:hi[:step]' (inclusive)."""
    if ":" in text:
        parts = text.split(":")
        lo = cast(parts[0])
        hi = cast(parts[1])
        if len(parts) == 3:
            step = cast(parts[2])
        else:
            step = cast(1)
        out = []
        value = lo
        # tolerance keeps float accumulation from dropping the endpoint
        while value <= hi + 1e-9:
            out.append(cast(round(value, 12)))
            value += step
        return out
    return [cast(p) for p in text.split(",") if p]


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file preloading run settings")
    p.add_argument("--protocol", choices=["acrlnc", "srarq"])
    p.add_argument("--channel", choices=["bec", "ge", "trace"])
    p.add_argument("--eps", type=float, help="erasure probability (BEC) or GE average")
    p.add_argument("--q", type=float, help="GE good-to-bad transition probability")
    p.add_argument("--s", type=float, help="GE bad-to-good transition probability")
    p.add_argument("--trace", dest="trace_path", help="trace file for --channel trace")
    p.add_argument("--rtt", type=int)
    p.add_argument("--overlap-factor", type=float, dest="overlap_factor")
    p.add_argument("--th", type=float)
    p.add_argument("--th-adaptive", action="store_true", default=None,
                   dest="th_adaptive")
    p.add_argument("--packets", type=int)
    p.add_argument("--payload-len", type=int, dest="payload_len")
    p.add_argument("--horizon", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--delay-clock", choices=["ack", "receiver"],
                   dest="delay_clock")
    p.add_argument("--m-override", type=int, dest="m_override")


def _build_run_config(args: argparse.Namespace) -> RunConfig:
    settings: dict = {}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        valid = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(loaded) - valid
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)
    for f in dataclasses.fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            settings[f.name] = value
    return RunConfig(**settings)


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    cfg = _build_run_config(args)
    result = run(cfg)
    if args.record_trace:
        from .channels import save_trace
        save_trace(args.record_trace, result.erasures)
    if args.format == "json":
        _write(json.dumps(result.report.as_dict(with_records=args.records),
                          indent=2) + "\n", args.out)
    else:
        from .sweep import _run_row
        _write(rows_to_csv([_run_row(cfg)], SWEEP_CSV_HEADER), args.out)
    return 0


def cmd_replay(args) -> int:
    cfg = _build_run_config(args)
    cfg.channel = "trace"
    cfg.trace_path = args.path
    result = run(cfg)
    _write(json.dumps(result.report.as_dict(with_records=args.records),
                      indent=2) + "\n", args.out)
    return 0


def cmd_sweep(args) -> int:
    base = _build_run_config(args)
    protocols = ["acrlnc", "srarq"] if args.protocols == "both" \
        else [args.protocols]
    config = SweepConfig(
        base=base,
        protocols=protocols,
        eps_grid=parse_grid(args.eps_grid, float) if args.eps_grid else [],
        rtt_grid=parse_grid(args.rtt_grid, int) if args.rtt_grid else [],
        seeds=args.seeds,
        seed_base=base.seed,
        jobs=args.jobs,
    )
    rows = sweep(config)
    if args.format == "csv":
        _write(rows_to_csv(rows, SWEEP_CSV_HEADER), args.out)
    else:
        _write(rows_to_json(rows), args.out)
    return 0


def cmd_bounds(args) -> int:
    rows = bounds_rows(
        channel=args.channel,
        eps_grid=parse_grid(args.eps_grid, float),
        rtt_grid=parse_grid(args.rtt_grid, int),
        s=args.s,
        overlap_factor=args.overlap_factor,
        th=args.th,
        lam=args.lam,
        p_e_target=args.p_e_target,
        slots_for_lambda=args.slots,
    )
    if args.format == "csv":
        _write(rows_to_csv(rows, BOUNDS_CSV_HEADER), args.out)
    else:
        _write(rows_to_json(rows), args.out)
    return 0


def cmd_golden(args) -> int:
    ok, problems, result = run_golden(seed=args.seed)
    log = result.action_log or []
    print("slot  kind             window     feedback")
    for rec in log[:12]:
        fb = "-"
        if rec.feedback is not None:
            fb = f"{'ACK' if rec.feedback.ack else 'NACK'}({rec.feedback.slot})"
        new = f" +p{rec.added}" if rec.added else ""
        print(f"{rec.slot:>4}  {rec.kind.value:<15}  "
              f"[{rec.window_start},{rec.window_end}]{new:<5} {fb}")
    if ok:
        print("golden walkthrough: PASS")
        return 0
    for p in problems:
        print(f"golden walkthrough: FAIL: {p}")
    return 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="acrlnc",
        description="Adaptive causal network-coding protocol laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configuration")
    _add_run_flags(p_sim)
    p_sim.add_argument("--format", choices=["json", "csv"], default="json")
    p_sim.add_argument("--out")
    p_sim.add_argument("--records", action="store_true",
                       help="include per-packet delivery records")
    p_sim.add_argument("--record-trace",
                       help="write the channel realization to a trace file")
    p_sim.set_defaults(fn=cmd_simulate)

    p_rep = sub.add_parser("replay", help="run against a recorded trace")
    p_rep.add_argument("path")
    _add_run_flags(p_rep)
    p_rep.add_argument("--format", choices=["json"], default="json")
    p_rep.add_argument("--out")
    p_rep.add_argument("--records", action="store_true")
    p_rep.set_defaults(fn=cmd_replay)

    p_sw = sub.add_parser("sweep", help="grid of runs, CSV/JSON dataset")
    _add_run_flags(p_sw)
    p_sw.add_argument("--protocols", choices=["both", "acrlnc", "srarq"],
                      default="both")
    p_sw.add_argument("--eps-grid", dest="eps_grid",
                      help="e.g. 0.05,0.1,0.2 or 0.1:0.5:0.1")
    p_sw.add_argument("--rtt-grid", dest="rtt_grid", help="e.g. 4,10,20")
    p_sw.add_argument("--seeds", type=int, default=20)
    p_sw.add_argument("--jobs", type=int, default=1)
    p_sw.add_argument("--format", choices=["csv", "json"], default="csv")
    p_sw.add_argument("--out")
    p_sw.set_defaults(fn=cmd_sweep)

    p_b = sub.add_parser("bounds", help="closed-form bound curves")
    p_b.add_argument("--channel", choices=["bec", "ge"], default="bec")
    p_b.add_argument("--eps-grid", dest="eps_grid", required=True)
    p_b.add_argument("--rtt-grid", dest="rtt_grid", required=True)
    p_b.add_argument("--s", type=float)
    p_b.add_argument("--overlap-factor", type=float, default=2.0,
                     dest="overlap_factor")
    p_b.add_argument("--th", type=float, default=0.0)
    p_b.add_argument("--lambda", type=float, default=None, dest="lam")
    p_b.add_argument("--p-e-target", type=float, default=1e-3,
                     dest="p_e_target")
    p_b.add_argument("--slots", type=int,
                     help="run length used for the default lambda = rtt/slots")
    p_b.add_argument("--format", choices=["csv", "json"], default="csv")
    p_b.add_argument("--out")
    p_b.set_defaults(fn=cmd_bounds)

    p_g = sub.add_parser("golden", help="verify the walkthrough scenario")
    p_g.add_argument("--seed", type=int, default=0)
    p_g.set_defaults(fn=cmd_golden)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
