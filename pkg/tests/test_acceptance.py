"""Acceptance suite: every criterion at its stated tolerance, one
pass/fail line each (run with -s to see them on success)."""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from frontier_dynamics.frontier import (
    ConstraintSet,
    dollar_neutral_optimize,
    efficient_frontier,
    frontier_with_turnover,
    grid_oracle,
    max_sharpe_portfolio,
    min_variance_for_target_return,
    tangency_portfolio,
)
from frontier_dynamics.logistic import (
    attractor_sample,
    detect_bifurcations,
    detect_period,
    feigenbaum_ratio,
    find_chaos_onset,
    period2_points,
)
from frontier_dynamics.market_data import AssetMoments
from frontier_dynamics.stability import (
    ScreenConfig,
    ScreenPolicy,
    build_asset_dynamics,
    lyapunov_exponent,
    report_to_dict,
    screen_portfolio,
)

FEIGENBAUM = 4.669201609


@contextmanager
def criterion(n, desc, limit=None):
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        if limit is not None and elapsed >= limit:
            raise AssertionError(
                f"runtime {elapsed:.1f}s exceeds the {limit}s budget"
            )
    except BaseException:
        print(f"[acceptance] criterion {n:02d} {desc}: FAIL")
        raise
    print(f"[acceptance] criterion {n:02d} {desc}: PASS ({elapsed:.1f}s)")


def test_criterion_01_period2_onset():
    with criterion(1, "period-2 onset b1 = 3.000 +- 1e-3", limit=5.0):
        seq = detect_bifurcations(2.95, 3.2, coarse_step=0.01, refine_tol=1e-5)
        assert abs(seq.b[0] - 3.000) < 1e-3


def test_criterion_02_period4_onset():
    with criterion(2, "period-4 onset b2 = 1+sqrt(6) +- 1e-3", limit=5.0):
        # the scan starts inside the period-2 band, so its first doubling
        # is the period-4 onset
        seq = detect_bifurcations(3.05, 3.5, coarse_step=0.01, refine_tol=1e-5)
        assert abs(seq.b[0] - 3.449490) < 1e-3
        assert abs(seq.b[0] - (1.0 + math.sqrt(6.0))) < 1e-3


def test_criterion_03_chaos_onset():
    with criterion(3, "chaos onset in [3.5690, 3.5710]", limit=30.0):
        onset = find_chaos_onset()
        assert 3.5690 <= onset <= 3.5710


def test_criterion_04_feigenbaum_ratios():
    with criterion(4, "Feigenbaum ratios from b1..b4", limit=60.0):
        seq = detect_bifurcations(2.95, 3.5668, coarse_step=0.002,
                                  refine_tol=1e-5)
        assert len(seq.b) == 4
        est = feigenbaum_ratio(seq)
        assert abs(est.ratios[0] - 4.75) < 0.05
        assert abs(est.ratios[1] - FEIGENBAUM) / FEIGENBAUM < 0.02


def test_criterion_05_lyapunov_benchmarks():
    with criterion(5, "Lyapunov exponents at r = 4, 2.5, 3.2", limit=10.0):
        assert lyapunov_exponent(4.0, 0.2, n=1_000_000) == pytest.approx(
            0.6931, abs=1e-3
        )
        assert lyapunov_exponent(2.5, 0.4, n=100_000) == pytest.approx(
            -0.6931, abs=1e-3
        )
        assert lyapunov_exponent(3.2, 0.4, n=100_000) == pytest.approx(
            -0.9163, abs=1e-3
        )


def test_criterion_06_period2_algebra():
    with criterion(6, "two-cycle algebra and multiplier -r^2+2r+4"):
        for r in (3.1, 3.2, 3.3, 3.4):
            x1, x2 = period2_points(r)
            f = lambda x: r * x * (1 - x)
            for x in (x1, x2):
                assert abs(f(f(x)) - x) < 1e-12
            h = 1e-6
            numeric = (f(f(x1 + h)) - f(f(x1 - h))) / (2 * h)
            assert abs(numeric - (-r * r + 2 * r + 4)) < 1e-6


def test_criterion_07_sharkovsky_window():
    with criterion(7, "period 3 at r = 3.835", limit=5.0):
        sample = attractor_sample(3.835, 0.4, 4000, 400)
        assert detect_period(sample) == 3


def test_criterion_08_two_asset_closed_form():
    with criterion(8, "two-asset closed form vs general solver"):
        m = AssetMoments(
            np.array([0.10, 0.15]),
            np.array([[0.04, 0.0], [0.0, 0.09]]),
        )
        w1 = 0.09 / 0.13
        w_star = np.array([w1, 1 - w1])
        assert w1 == pytest.approx(0.69231, abs=1e-5)
        sigma_star = math.sqrt(w_star @ m.sigma @ w_star)
        assert sigma_star == pytest.approx(0.16641, abs=1e-5)
        pt = min_variance_for_target_return(
            m, float(m.mu @ w_star), ConstraintSet(budget=1.0)
        )
        assert np.max(np.abs(pt.weights.weights - w_star)) < 1e-8
        assert abs(pt.sigma_p - sigma_star) < 1e-8


def test_criterion_09_oracle_equivalence():
    with criterion(9, "solver vs grid oracle on 20 seeded instances", limit=120.0):
        step = 0.005
        for seed in range(20):
            rng = np.random.default_rng(seed)
            a = rng.normal(size=(3, 3))
            sigma = a @ a.T / 6.0 + np.diag(rng.uniform(0.01, 0.05, 3))
            mu = rng.uniform(0.02, 0.15, 3)
            m = AssetMoments(mu, sigma)
            cset = ConstraintSet.long_only()
            target = float(mu @ np.full(3, 1.0 / 3.0))
            pt = min_variance_for_target_return(m, target, cset)
            oracle = grid_oracle(m, cset, target, step)
            lipschitz = math.sqrt(float(np.linalg.eigvalsh(sigma)[-1]))
            assert pt.sigma_p <= oracle.sigma_p + 2 * step * lipschitz
            w = pt.weights.weights
            assert abs(float(np.sum(w)) - 1.0) <= 1e-10
            assert np.all(w >= -1e-10)
            assert abs(pt.mu_p - target) <= 1e-10


def test_criterion_10_tangency_dual_construction():
    with criterion(10, "tangency equals max-Sharpe; tangent line dominates"):
        r_f = 0.02
        instances = [
            (AssetMoments(np.array([0.10, 0.15]), np.diag([0.04, 0.09])),
             ConstraintSet(budget=1.0)),
            (AssetMoments(np.array([0.10, 0.15, 0.12]),
                          np.diag([0.04, 0.09, 0.0625])),
             ConstraintSet.long_only()),
        ]
        for m, cset in instances:
            tan = tangency_portfolio(m, cset, r_f)
            sharpe = max_sharpe_portfolio(m, cset, r_f)
            assert np.max(np.abs(tan.weights.weights
                                 - sharpe.weights.weights)) < 1e-8
        m, cset = instances[1]
        tan = tangency_portfolio(m, cset, r_f)
        for p in efficient_frontier(m, cset, 41):
            assert p.mu_p <= r_f + tan.sharpe * p.sigma_p + 1e-8


def test_criterion_11_constrained_scenarios():
    with criterion(11, "130-30 dominance, dollar-neutral exactness, turnover collapse"):
        m = AssetMoments(
            np.array([0.10, 0.15, 0.12]), np.diag([0.04, 0.09, 0.0625])
        )
        long_only = ConstraintSet.long_only()
        ls = ConstraintSet.one_thirty_thirty(0.3)
        for p in efficient_frontier(m, long_only, 15):
            relaxed = min_variance_for_target_return(m, p.mu_p, ls)
            assert relaxed.sigma_p <= p.sigma_p + 1e-10

        dn = ConstraintSet.dollar_neutral(1.0)
        for target in (None, 0.0, 0.005, 0.01):
            pt = dollar_neutral_optimize(m, dn, target_mu=target)
            w = pt.weights.weights
            assert abs(float(np.sum(w))) <= 1e-10
            assert float(np.sum(np.abs(w))) <= 1.0 + 1e-10

        ref = np.array([1 / 3, 1 / 3, 1 / 3])
        collapsed = frontier_with_turnover(
            m, ConstraintSet.with_turnover(ref, 0.0), 11
        )
        assert len(collapsed) == 1
        assert np.max(np.abs(collapsed[0].weights.weights - ref)) < 1e-9


def test_criterion_12_ledenyov_screen():
    with criterion(12, "pair screen regimes and seeded determinism"):
        cfg = ScreenConfig()
        quiet = [build_asset_dynamics(n, 0.1, cfg) for n in ("a", "b", "c")]
        report = screen_portfolio(quiet, ScreenPolicy(), cfg)
        assert report.overall is True
        assert len(report.verdicts) == 3

        wild = quiet + [build_asset_dynamics("d", 0.6, cfg)]
        report2 = screen_portfolio(wild, ScreenPolicy(), cfg)
        assert report2.overall is False

        policy = ScreenPolicy("SAMPLED", k=3, seed=11)
        blob1 = json.dumps(report_to_dict(
            screen_portfolio(wild, policy, cfg)), sort_keys=True)
        blob2 = json.dumps(report_to_dict(
            screen_portfolio(wild, policy, cfg)), sort_keys=True)
        assert blob1 == blob2
