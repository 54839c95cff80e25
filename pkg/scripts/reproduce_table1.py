#!/usr/bin/env python3
"""Run the eight-state study and print it next to the measured table."""

import argparse

from concbounds.config import load_scenario
from concbounds.report import TABLE1, emit_report, run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/table1.yaml")
    ap.add_argument("--csv", help="write the simulated rows here")
    args = ap.parse_args()

    scen = load_scenario(args.config)
    rows = run_scenario(scen)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(emit_report(rows, "csv"))

    head = f"{'d':>6} | {'Cl_tom':>13} | {'Cl_twofold':>23} | {'C_tom':>13} | {'Cu_twofold':>23} | {'Cu_tom':>13}"
    print(head)
    print("-" * len(head))
    for sim, bench in zip(rows, TABLE1):
        print(
            f"{sim.label:>6} | {sim.Cl_tom:.3f} ({bench.Cl_tom:.3f}) | "
            f"{sim.Cl_twofold:.3f}+-{sim.Cl_twofold_err:.3f} ({bench.Cl_twofold:.3f}+-{bench.Cl_twofold_err:.3f}) | "
            f"{sim.C_tom:.3f} ({bench.C_tom:.3f}) | "
            f"{sim.Cu_twofold:.3f}+-{sim.Cu_twofold_err:.3f} ({bench.Cu_twofold:.3f}+-{bench.Cu_twofold_err:.3f}) | "
            f"{sim.Cu_tom:.3f} ({bench.Cu_tom:.3f})"
        )
    print("\nsimulated value (measured value in parentheses)")


if __name__ == "__main__":
    main()
