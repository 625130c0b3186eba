"""Closed-form mean-variance analytics.

Portfolio mean w'mu and standard deviation sqrt(w' sigma w), plus the
analytic two-asset frontier swept in weight space:

    mu_p    = w1 mu1 + w2 mu2
    sigma_p = sqrt(w1^2 s1^2 + w2^2 s2^2 + 2 rho w1 w2 s1 s2)

with minimum-variance weight w1* = (s2^2 - rho s1 s2) / (s1^2 + s2^2 - 2 rho s1 s2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotTwoAssets, NumericalFailure
from .market_data import AssetMoments

# w' sigma w this far below zero is PSD rounding noise and is clamped;
# anything lower means the moments were corrupted after validation.
VARIANCE_CLAMP = -1e-12


@dataclass(frozen=True)
class PortfolioWeights:
    """Capital fractions per asset; sign-free (shorts are negative)."""

    weights: np.ndarray
    label: str | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        object.__setattr__(self, "weights", w)
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")

    def __len__(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class FrontierPoint:
    """A portfolio with its (expected return, standard deviation) image."""

    mu_p: float
    sigma_p: float
    weights: PortfolioWeights

    def __post_init__(self):
        if self.sigma_p < 0:
            raise ValueError("sigma_p must be non-negative")


@dataclass(frozen=True)
class TwoAssetFrontier:
    """Uniform w1 sweep over [0, 1] plus the analytic minimum-variance weight."""

    points: tuple[FrontierPoint, ...]
    w1_min_variance: float


def _check_len(w: PortfolioWeights, m: AssetMoments) -> np.ndarray:
    v = w.weights
    if v.shape[0] != m.n_assets:
        raise DimensionMismatch(
            f"{v.shape[0]} weights against {m.n_assets} assets"
        )
    return v


def portfolio_mean(w: PortfolioWeights, m: AssetMoments) -> float:
    """Expected portfolio return w'mu."""
    return float(_check_len(w, m) @ m.mu)


def portfolio_stddev(w: PortfolioWeights, m: AssetMoments) -> float:
    """Portfolio return standard deviation sqrt(w' sigma w)."""
    v = _check_len(w, m)
    q = float(v @ m.sigma @ v)
    if q < VARIANCE_CLAMP:
        raise NumericalFailure(
            f"w' sigma w = {q:g} is negative beyond rounding noise"
        )
    return float(np.sqrt(max(q, 0.0)))


def evaluate(w: PortfolioWeights, m: AssetMoments) -> FrontierPoint:
    """Bundle a weight vector with its frontier-space image."""
    return FrontierPoint(portfolio_mean(w, m), portfolio_stddev(w, m), w)


def two_asset_frontier(m: AssetMoments, n_points: int) -> TwoAssetFrontier:
    """Sweep w1 uniformly over [0, 1] for a two-asset universe.

    Also reports the analytic minimum-variance weight w1*. When the two
    assets are perfectly correlated with equal volatility every mix has the
    same risk and w1* is reported as 0.5.
    """
    if m.n_assets != 2:
        raise NotTwoAssets(f"need exactly 2 assets, got {m.n_assets}")
    if n_points < 2:
        raise ValueError("n_points must be at least 2")

    s1s, s2s = float(m.sigma[0, 0]), float(m.sigma[1, 1])
    cov = float(m.sigma[0, 1])
    denom = s1s + s2s - 2.0 * cov  # variance of the (1, -1) spread, >= 0
    w1_star = 0.5 if denom <= 0 else (s2s - cov) / denom

    points = []
    for w1 in np.linspace(0.0, 1.0, n_points):
        w = PortfolioWeights(np.array([w1, 1.0 - w1]))
        points.append(evaluate(w, m))
    return TwoAssetFrontier(tuple(points), float(w1_star))
