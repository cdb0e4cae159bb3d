#!/usr/bin/env python3
"""Spillover connectedness on a two-regime VAR.

Three series follow a VAR(1) whose off-diagonal coefficients are zero for
the first half of the sample and switch on at the midpoint.  A forecast-
error variance decomposition should therefore attribute almost nothing to
cross-effects early on, and a substantial share once the coupling starts --
visible both in the full-sample table and, sharply, in the rolling total
spillover index.

Run from the repository root:  python demos/spillover_network.py
"""

import numpy as np

from hpar.spillover import (connectedness, fit_var, girf_fevd,
                            impulse_response, rolling_spillover)
from hpar.synth import regime_switch_var


def print_table(title, names, rows, fmt="{:8.1f}"):
    print(f"\n{title}")
    print("          " + "".join(f"{n:>8}" for n in names))
    for name, row in zip(names, rows):
        print(f"  {name:<8}" + "".join(fmt.format(v) for v in row))


def main():
    panel, truth = regime_switch_var(160, seed=2, n_series=3, diag=0.2,
                                     cross=0.3)
    names = truth.columns
    data = panel.frame.to_numpy()
    switch = truth.switch_index
    print(f"Two-regime VAR(1), {panel.n_periods} quarters, coupling switches "
          f"on at observation {switch} ({panel.frame.index[switch]}).")
    print(f"calm transition matrix:\n{truth.calm_matrix}")
    print(f"coupled transition matrix:\n{truth.coupled_matrix}")

    for label, sample in (("calm half", data[:switch]),
                          ("coupled half", data[switch:])):
        model = fit_var(sample, names=names, p=1)
        report = connectedness(girf_fevd(model, horizon=12))
        print_table(f"FEVD shares, {label} (12-step, percent)",
                    names, report.table)
        print(f"  total spillover index: {report.total:.1f}")
        print("  net positions: "
              + ", ".join(f"{n} {v:+.1f}" for n, v in zip(names, report.net)))

    window = 40
    rolling = rolling_spillover(data, names=names, window=window, p=1,
                                horizon=12, dates=list(panel.frame.index))
    totals = np.array([np.nan if r is None else r.total
                       for r in rolling.reports])
    # window ending at index i covers observations i-window+1 .. i
    calm = totals[:switch - window + 1]
    coupled = totals[switch + window - 1:]
    print(f"\nRolling total spillover ({window}-quarter windows):")
    print(f"  windows fully inside the calm regime:    "
          f"mean {np.nanmean(calm):5.1f}")
    print(f"  windows fully inside the coupled regime: "
          f"mean {np.nanmean(coupled):5.1f}")
    ramp = totals[switch - window + 1:switch + window - 1]
    print(f"  transition windows in between:           "
          f"mean {np.nanmean(ramp):5.1f}")
    print("  (windows straddling the break overshoot: the level shift in")
    print("   comovement looks like extra coupling to a one-regime VAR)")

    model = fit_var(data[switch:], names=names, p=1)
    irf = impulse_response(model, names[0], horizon=8)
    print(f"\nResponses to a one-s.d. {names[0]} shock (coupled regime):")
    print("  h   " + "".join(f"{n:>8}" for n in names))
    for h in (0, 1, 2, 4, 8):
        print(f"  {h}  " + "".join(f"{v:8.3f}" for v in irf[h]))
    print("Cross-responses appear at h=1 and die out geometrically; the")
    print("spillover index above is the variance-share view of the same fact.")


if __name__ == "__main__":
    main()
