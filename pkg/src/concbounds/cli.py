"""Command-line entry point: ``concbounds <subcommand>``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import coincidence as cs
from .concurrence import lower_bound, purity_oracle, upper_bound, wootters_concurrence
from .config import default_seed, load_scenario, parse_state
from .errors import ConfigError, InsufficientDataError
from .qlinalg import DensityMatrix
from .report import emit_report, run_scenario, stream_seed, verify_table1, write_report
from .tomography import TomoCounts, reconstruct, simulate_counts


def _dump(doc, out: str | None = None):
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_bounds(args) -> int:
    rho = parse_state(args.state)
    _dump(
        {
            "state": args.state,
            "concurrence": wootters_concurrence(rho),
            "lower": lower_bound(rho).as_dict(),
            "upper": upper_bound(rho).as_dict(),
            "purity_oracle": purity_oracle(rho)._asdict(),
        }
    )
    return 0


def cmd_tomo(args) -> int:
    if args.counts:
        counts = TomoCounts.from_json(Path(args.counts).read_text())
        truth = None
    else:
        if not args.state:
            raise ConfigError("tomo needs --state or --counts")
        truth = parse_state(args.state)
        counts = simulate_counts(truth, args.shots, args.seed)
        if args.counts_out:
            Path(args.counts_out).write_text(counts.to_json())
    res = reconstruct(counts, truth)
    doc = res.as_dict()
    doc["counts"] = json.loads(counts.to_json())
    _dump(doc, args.out)
    return 0


def _sim_config(args) -> cs.SimConfig:
    return cs.SimConfig(
        mode_overlap=args.overlap,
        signal_strength=args.signal,
        mc_trials=args.mc_trials,
        visibility_correction=args.visibility_correction,
    )


def cmd_simulate(args) -> int:
    if args.record:
        rec = cs.CountRecord.from_json(Path(args.record).read_text())
        cfg = cs.SimConfig.from_dict(rec.config) if rec.config and not args.override else _sim_config(args)
        _dump({"record": rec.to_dict(), "estimate": cs.estimate_bounds(rec, cfg).as_dict()}, args.out)
        return 0
    if args.config:
        scen = load_scenario(args.config)
        cfg, seed = scen.sim, scen.seed
        states = [(label, make()) for label, make in scen.states]
    elif args.state:
        cfg, seed = _sim_config(args), args.seed
        states = [(args.state, parse_state(args.state))]
    else:
        raise ConfigError("simulate needs --config, --state or --record")
    runs = []
    for i, (label, rho) in enumerate(states):
        rec = cs.simulate_run(rho, cfg, stream_seed(seed, i, 2))
        runs.append(
            {
                "label": label,
                "record": rec.to_dict(),
                "estimate": cs.estimate_bounds(rec, cfg).as_dict(),
                "exact": {"lower": lower_bound(rho).value, "upper": upper_bound(rho).value},
            }
        )
    _dump(runs, args.out)
    return 0


def cmd_table1(args) -> int:
    scen = load_scenario(args.config)
    rows = run_scenario(scen)
    if scen.csv_path:
        write_report(rows, scen.csv_path, "csv")
    if scen.json_path:
        write_report(rows, scen.json_path, "json")
    text = emit_report(rows, args.format)
    if args.out:
        write_report(rows, args.out, args.format)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    chk = verify_table1()
    for line in chk.lines:
        print(line)
    print("table1: " + ("PASS" if chk.passed else "FAIL"))
    return 0 if chk.passed else 1


def cmd_dipscan(args) -> int:
    if args.pair == "parallel":
        psi = np.zeros(4)
        psi[0] = 1.0
        pair = DensityMatrix(np.outer(psi, psi), (2, 2))
    else:
        pair = DensityMatrix(np.eye(4) / 4, (2, 2))
    xs = np.linspace(-args.span, args.span, args.points)
    curve = cs.dip_curve(pair, args.overlap, xs, args.width)
    _dump(
        {
            "overlap": args.overlap,
            "pair": args.pair,
            "visibility": cs.dip_scan(pair, args.overlap, xs, args.width),
            "positions": xs.tolist(),
            "coincidence": curve.tolist(),
        }
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    seed = default_seed()
    p = argparse.ArgumentParser(prog="concbounds", description="Concurrence bounds from twofold-copy parity measurements")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="exact concurrence and bounds for a state")
    b.add_argument("--state", required=True, help="singlet | mixed | werner:P | dephased:D | quartz:MM | random:SEED[:RANK] | FILE.json")
    b.set_defaults(func=cmd_bounds)

    t = sub.add_parser("tomo", help="simulate 16-setting tomography and reconstruct")
    t.add_argument("--state")
    t.add_argument("--shots", type=int, default=10_000)
    t.add_argument("--seed", type=int, default=seed)
    t.add_argument("--counts", help="reconstruct from a TomoCounts JSON file instead")
    t.add_argument("--counts-out", help="also write the simulated counts here")
    t.add_argument("--out")
    t.set_defaults(func=cmd_tomo)

    s = sub.add_parser("simulate", help="coincidence run(s) and bound estimates")
    s.add_argument("--config")
    s.add_argument("--state")
    s.add_argument("--record", help="analyze an existing CountRecord JSON file")
    s.add_argument("--override", action="store_true", help="use command-line sim options over the record's config")
    s.add_argument("--overlap", type=float, default=1.0)
    s.add_argument("--signal", type=float, default=5000.0)
    s.add_argument("--mc-trials", type=int, default=1000)
    s.add_argument("--visibility-correction", action="store_true")
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    tb = sub.add_parser("table1", help="full study, CSV or JSON report")
    tb.add_argument("--config", required=True)
    tb.add_argument("--format", choices=("csv", "json"), default="csv")
    tb.add_argument("--out")
    tb.set_defaults(func=cmd_table1)

    v = sub.add_parser("verify-table1", help="check the embedded bench table")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("dipscan", help="two-photon dip at one beamsplitter")
    d.add_argument("--overlap", type=float, required=True)
    d.add_argument("--pair", choices=("mixed", "parallel"), default="mixed")
    d.add_argument("--width", type=float, default=1.0)
    d.add_argument("--span", type=float, default=8.0)
    d.add_argument("--points", type=int, default=81)
    d.set_defaults(func=cmd_dipscan)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (ConfigError, InsufficientDataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
