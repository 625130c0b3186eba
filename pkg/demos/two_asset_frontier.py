"""Two-asset frontier walkthrough.

Sweeps the classic two-asset mix, prints the risk/return table for a few
correlation levels, and checks the analytic minimum-variance weight
against the sweep.
"""

import numpy as np

from frontier_dynamics import AssetMoments, two_asset_frontier

MU = np.array([0.10, 0.15])
VOLS = np.array([0.2, 0.3])


def moments(rho):
    cov = rho * VOLS[0] * VOLS[1]
    return AssetMoments(MU, np.array([[VOLS[0] ** 2, cov], [cov, VOLS[1] ** 2]]))


def main():
    for rho in (-1.0, -0.5, 0.0, 0.5, 1.0):
        res = two_asset_frontier(moments(rho), n_points=11)
        print(f"\nrho = {rho:+.1f}   minimum-variance w1* = {res.w1_min_variance:.5f}")
        print("  w1     mu_p    sigma_p")
        for p in res.points:
            print(f"  {p.weights.weights[0]:.2f}   {p.mu_p:.4f}  {p.sigma_p:.5f}")

    res = two_asset_frontier(moments(0.0), n_points=2001)
    sweep_best = min(res.points, key=lambda p: p.sigma_p)
    print(f"\nzero correlation: sweep minimum sits at w1 = "
          f"{sweep_best.weights.weights[0]:.4f}, analytic w1* = "
          f"{res.w1_min_variance:.4f} (sigma {sweep_best.sigma_p:.5f})")


if __name__ == "__main__":
    main()
