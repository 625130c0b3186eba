"""Logistic-map tour: fixed-point algebra, the doubling cascade, and the
route to chaos.

Writes the bifurcation diagram (CSV and SVG) into ./demo_output and prints
the detected doubling parameters with their Feigenbaum ratios.
"""

from pathlib import Path

import numpy as np

from frontier_dynamics import (
    attractor_sample,
    bifurcation_diagram,
    detect_bifurcations,
    detect_period,
    feigenbaum_ratio,
    find_chaos_onset,
    fixed_points,
    multiplier_at,
    period2_multiplier,
    period2_points,
)
from frontier_dynamics.render import render_bifurcation_svg

OUT = Path(__file__).resolve().parent / "demo_output"


def main():
    print("== fixed-point algebra ==")
    for r in (2.5, 3.2, 3.9):
        pts = fixed_points(r)
        mults = [multiplier_at(r, x) for x in pts]
        print(f"r={r}: fixed points {pts} with multipliers "
              f"{[f'{m:+.3f}' for m in mults]}")
    x1, x2 = period2_points(3.2)
    print(f"r=3.2 two-cycle: ({x1:.5f}, {x2:.5f}), "
          f"multiplier {period2_multiplier(3.2):+.3f}")
    print(f"two-cycle loses stability at 1+sqrt(6) = {1 + np.sqrt(6):.6f} "
          f"(multiplier there: {period2_multiplier(1 + np.sqrt(6)):+.3f})")

    print("\n== attractor regimes ==")
    for r in (2.8, 3.2, 3.5, 3.835, 3.9):
        sample = attractor_sample(r, 0.4, 4000, 400)
        print(f"r={r}: detected period {detect_period(sample)}")

    print("\n== doubling cascade ==")
    seq = detect_bifurcations(2.95, 3.5668, coarse_step=0.002, refine_tol=1e-5)
    for i, b in enumerate(seq.b, start=1):
        print(f"b{i} = {b:.6f}")
    est = feigenbaum_ratio(seq)
    for i, ratio in enumerate(est.ratios, start=2):
        print(f"ratio {i}: {ratio:.4f}  (limit {est.reference})")

    onset = find_chaos_onset()
    print(f"first parameter past the detector's periodic reach: {onset:.4f}")

    print("\n== diagram files ==")
    OUT.mkdir(exist_ok=True)
    diagram = bifurcation_diagram(2.5, 4.0, 900, x0=0.5,
                                  n_transient=1000, n_keep=200)
    rows = ["r,x"]
    for i in range(diagram.r_grid.shape[0]):
        r_txt = format(diagram.r_grid[i], ".12g")
        rows.extend(f"{r_txt},{format(x, '.12g')}"
                    for x in diagram.attractor_points[i])
    (OUT / "diagram.csv").write_text("\n".join(rows) + "\n")
    (OUT / "diagram.svg").write_text(render_bifurcation_svg(diagram))
    print(f"wrote {OUT / 'diagram.csv'} and {OUT / 'diagram.svg'}")


if __name__ == "__main__":
    main()
