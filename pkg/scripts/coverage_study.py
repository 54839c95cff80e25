#!/usr/bin/env python3
"""Bootstrap error bars: 1-sigma coverage and scaling with signal strength."""

import argparse

import numpy as np

from concbounds import coincidence as X
from concbounds.concurrence import lower_bound, upper_bound
from concbounds.states import dephased_singlet


def coverage(d, signal, runs, trials, overlap, correct):
    rho = dephased_singlet(d)
    lo, up = lower_bound(rho).value, upper_bound(rho).value
    cfg = X.SimConfig(mode_overlap=overlap, signal_strength=signal, mc_trials=trials, visibility_correction=correct)
    res = X.run_trials(rho, cfg, range(runs))
    est_lo = np.array([e.lower.value for _, _, e in res])
    err_lo = np.array([e.lower.std_error for _, _, e in res])
    est_up = np.array([e.upper.value for _, _, e in res])
    err_up = np.array([e.upper.std_error for _, _, e in res])
    return {
        "lower_true": lo,
        "upper_true": up,
        "lower_mean": est_lo.mean(),
        "upper_mean": est_up.mean(),
        "lower_sigma": np.median(err_lo),
        "upper_sigma": np.median(err_up),
        "lower_cov": np.mean(np.abs(est_lo - lo) <= err_lo),
        "upper_cov": np.mean(np.abs(est_up - up) <= err_up),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=float, default=0.93)
    ap.add_argument("--runs", type=int, default=500)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--overlap", type=float, default=1.0)
    ap.add_argument("--correct", action="store_true")
    ap.add_argument("--signals", type=float, nargs="+", default=[1e3, 2e3, 5e3, 1e4, 1e5])
    args = ap.parse_args()

    print(f"{'signal':>8} {'lower':>7} {'sigma':>7} {'cov':>6} {'upper':>7} {'sigma':>7} {'cov':>6}")
    for s in args.signals:
        r = coverage(args.d, s, args.runs, args.trials, args.overlap, args.correct)
        print(
            f"{s:8.0f} {r['lower_mean']:7.4f} {r['lower_sigma']:7.4f} {r['lower_cov']:6.3f} "
            f"{r['upper_mean']:7.4f} {r['upper_sigma']:7.4f} {r['upper_cov']:6.3f}"
        )
    print(f"exact: lower {r['lower_true']:.4f}, upper {r['upper_true']:.4f}")


if __name__ == "__main__":
    main()
