"""Constrained frontier scenarios on a four-asset universe.

Runs the whole scenario family off one set of moments: long-only frontier
with corner portfolios, tangency vs direct Sharpe maximization, a
turnover-capped rebalance, a dollar-neutral book and a 130/30 book.
"""

import numpy as np

from frontier_dynamics import (
    AssetMoments,
    ConstraintSet,
    corner_portfolios,
    dollar_neutral_optimize,
    efficient_frontier,
    frontier_with_turnover,
    max_sharpe_portfolio,
    optimize_130_30,
    tangency_portfolio,
)

MU = np.array([0.06, 0.10, 0.13, 0.16])
VOLS = np.array([0.10, 0.18, 0.24, 0.32])
CORR = np.array([
    [1.00, 0.30, 0.20, 0.10],
    [0.30, 1.00, 0.45, 0.25],
    [0.20, 0.45, 1.00, 0.35],
    [0.10, 0.25, 0.35, 1.00],
])
MOMENTS = AssetMoments(MU, CORR * np.outer(VOLS, VOLS),
                       asset_names=("bonds", "large", "small", "emerging"))


def show(label, weights, mu, sigma):
    w_txt = " ".join(f"{w:+.3f}" for w in weights)
    print(f"{label:<28} mu={mu:.4f} sigma={sigma:.4f}  w=[{w_txt}]")


def main():
    long_only = ConstraintSet.long_only()

    print("== long-only frontier (every 5th point) ==")
    for p in efficient_frontier(MOMENTS, long_only, 26)[::5]:
        show("frontier point", p.weights.weights, p.mu_p, p.sigma_p)

    print("\n== corner portfolios ==")
    for c in corner_portfolios(MOMENTS, long_only):
        tags = ";".join(c.active_set) or "(interior)"
        show(f"corner {tags}", c.weights.weights, c.mu_p, c.sigma_p)

    r_f = 0.02
    tan = tangency_portfolio(MOMENTS, long_only, r_f)
    direct = max_sharpe_portfolio(MOMENTS, long_only, r_f)
    print("\n== tangency (rf = 2%) ==")
    show("homogenized QP", tan.weights.weights, tan.mu_p, tan.sigma_p)
    show("frontier ratio search", direct.weights.weights, direct.mu_p, direct.sigma_p)
    gap = np.max(np.abs(tan.weights.weights - direct.weights.weights))
    print(f"max weight disagreement between the two routes: {gap:.2e}")
    print(f"Sharpe ratio {tan.sharpe:.4f}")

    print("\n== turnover-capped rebalance from equal weights ==")
    ref = np.full(4, 0.25)
    for tau in (0.05, 0.15, 0.50):
        pts = frontier_with_turnover(
            MOMENTS, ConstraintSet.with_turnover(ref, tau), 21)
        top = pts[-1]
        moved = 0.5 * np.sum(np.abs(top.weights.weights - ref))
        show(f"tau={tau:.2f} max-return end", top.weights.weights, top.mu_p,
             top.sigma_p)
        print(f"{'':<28} turnover used: {moved:.3f}")

    print("\n== dollar-neutral and 130/30 books ==")
    dn = dollar_neutral_optimize(MOMENTS, ConstraintSet.dollar_neutral(1.0))
    show("dollar-neutral max-return", dn.weights.weights, dn.mu_p, dn.sigma_p)
    ls = optimize_130_30(MOMENTS, ConstraintSet.one_thirty_thirty(0.3))
    show("130/30 max-return", ls.weights.weights, ls.mu_p, ls.sigma_p)
    shorts = np.sum(np.maximum(-ls.weights.weights, 0))
    print(f"{'':<28} short side: {shorts:.3f} (cap 0.3)")


if __name__ == "__main__":
    main()
