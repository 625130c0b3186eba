"""Pairwise portfolio stability screening on volatility-mapped dynamics.

Each asset's annualized volatility maps affinely onto a logistic-map
parameter; the screen then demands, for every examined pair of assets,
that both members have a non-positive largest Lyapunov exponent and that
nearby trajectories of both mapped dynamics stay close. A portfolio
passes when every examined pair passes.

The exponent is the orbit average of ln|f'(x)| with f'(x) = r - 2rx.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateOrbit, ParamOutOfRange, TooFewAssets
from .logistic import MapParams
from .market_data import AssetMoments, annualize
from .mean_variance import FrontierPoint

# a marginal exponent (|exponent| below this) counts as stable: orbits at a
# doubling point neither converge nor diverge exponentially
STABILITY_MARGIN = 1e-4


@dataclass(frozen=True)
class SigmaMapConfig:
    """Affine clamped map from annualized volatility to the map parameter:
    r = r_min + (r_max - r_min) * min(sigma / sigma_cap, 1)."""

    r_min: float = 2.8
    r_max: float = 4.0
    sigma_cap: float = 0.6

    def __post_init__(self):
        if not (0.0 < self.r_min < self.r_max <= 4.0):
            raise ParamOutOfRange(
                f"need 0 < r_min < r_max <= 4, got ({self.r_min}, {self.r_max})"
            )
        if self.sigma_cap <= 0:
            raise ParamOutOfRange("sigma_cap must be positive")


@dataclass(frozen=True)
class ScreenConfig:
    """Numerical knobs for the divergence and exponent runs."""

    sigma_map: SigmaMapConfig = field(default_factory=SigmaMapConfig)
    epsilon: float = 1e-6          # seed separation
    delta: float = 1e-2            # separation that counts as divergence
    n_divergence: int = 1000
    n_lyapunov: int = 100_000
    n_transient: int = 1000
    x0: float = 0.4

    def __post_init__(self):
        if not (0.0 < self.epsilon < self.delta < 1.0):
            raise ParamOutOfRange("need 0 < epsilon < delta < 1")
        if not (0.0 < self.x0 < 1.0) or not (0.0 < self.x0 + self.epsilon < 1.0):
            raise ParamOutOfRange("x0 and x0 + epsilon must lie in (0, 1)")


@dataclass(frozen=True)
class AssetDynamics:
    """An asset's volatility, its mapped parameter and Lyapunov exponent."""

    name: str
    sigma_ann: float
    r: float
    lyapunov: float


@dataclass(frozen=True)
class PairVerdict:
    pair: tuple[str, str]
    stable: bool
    max_separation: float
    exponents: tuple[float, float]


@dataclass(frozen=True)
class ScreenPolicy:
    """ALL_PAIRS examines every pair; SAMPLED draws k distinct pairs with a
    seeded generator (reports are reproducible from the seed)."""

    kind: str = "ALL_PAIRS"
    k: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("ALL_PAIRS", "SAMPLED"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "SAMPLED":
            if self.k is None or self.k < 1:
                raise ValueError("SAMPLED policy needs k >= 1")
            if self.seed is None:
                raise ValueError("SAMPLED policy needs a seed")


@dataclass(frozen=True)
class StabilityReport:
    portfolio: str
    policy: ScreenPolicy
    verdicts: tuple[PairVerdict, ...]
    overall: bool

    def __post_init__(self):
        if self.overall != all(v.stable for v in self.verdicts):
            raise ValueError("overall verdict disagrees with the pair verdicts")


@dataclass(frozen=True)
class AnnotatedFrontierPoint:
    """A frontier point with its screen verdict; vacuous means no asset
    cleared the weight floor, so nothing was examined."""

    point: FrontierPoint
    stable: bool
    vacuous: bool


def map_sigma_to_r(sigma_ann: float, cfg: SigmaMapConfig | None = None) -> float:
    """Volatility to map parameter, linear up to sigma_cap then clamped."""
    cfg = cfg or SigmaMapConfig()
    if sigma_ann < 0:
        raise ParamOutOfRange(f"sigma_ann must be non-negative, got {sigma_ann}")
    frac = min(sigma_ann / cfg.sigma_cap, 1.0)
    return cfg.r_min + (cfg.r_max - cfg.r_min) * frac


def lyapunov_exponent(r: float, x0: float, n: int = 100_000,
                      n_transient: int = 1000) -> float:
    """Largest Lyapunov exponent: (1/n) sum ln|r - 2 r x_k| post-transient.

    Raises DegenerateOrbit when an iterate lands on the critical point
    (|f'| < 1e-300), where the log-sum is undefined.
    """
    MapParams(r, x0)
    if n < 10_000:
        raise ParamOutOfRange(f"need n >= 10000 for a usable average, got {n}")
    if n_transient < 0:
        raise ParamOutOfRange("n_transient must be non-negative")
    x = x0
    for _ in range(n_transient):
        x = r * x * (1.0 - x)
    total = 0.0
    for _ in range(n):
        deriv = abs(r - 2.0 * r * x)
        if deriv < 1e-300:
            raise DegenerateOrbit(
                f"orbit hit the critical point at r = {r}; exponent undefined"
            )
        total += math.log(deriv)
        x = r * x * (1.0 - x)
    return total / n


def divergence_test(r: float, x0: float, epsilon: float = 1e-6,
                    delta: float = 1e-2, n: int = 1000) -> tuple[bool, float]:
    """Track two seeds epsilon apart for n steps.

    Returns (stable, max separation); stable means the separation never
    exceeded delta.
    """
    MapParams(r, x0)
    if epsilon < 0 or not (epsilon < delta < 1.0):
        raise ParamOutOfRange("need 0 <= epsilon < delta < 1")
    if epsilon > 0:
        MapParams(r, x0 + epsilon)
    x, y = x0, x0 + epsilon
    worst = abs(y - x)
    stable = worst <= delta
    for _ in range(n):
        x = r * x * (1.0 - x)
        y = r * y * (1.0 - y)
        sep = abs(y - x)
        if sep > worst:
            worst = sep
            if worst > delta:
                stable = False
    return stable, worst


def build_asset_dynamics(name: str, sigma_ann: float,
                         cfg: ScreenConfig | None = None) -> AssetDynamics:
    """Map a volatility to its parameter and compute the exponent."""
    cfg = cfg or ScreenConfig()
    r = map_sigma_to_r(sigma_ann, cfg.sigma_map)
    lam = lyapunov_exponent(r, cfg.x0, cfg.n_lyapunov, cfg.n_transient)
    return AssetDynamics(name, float(sigma_ann), r, lam)


def dynamics_from_moments(m: AssetMoments,
                          cfg: ScreenConfig | None = None) -> list[AssetDynamics]:
    """Per-asset dynamics from moment estimates (volatility annualized first)."""
    cfg = cfg or ScreenConfig()
    ann = annualize(m)
    vols = np.sqrt(np.diag(ann.sigma))
    return [build_asset_dynamics(name, float(s), cfg)
            for name, s in zip(m.names(), vols)]


def _member_stable(a: AssetDynamics, cfg: ScreenConfig) -> tuple[bool, float]:
    ok, sep = divergence_test(a.r, cfg.x0, cfg.epsilon, cfg.delta, cfg.n_divergence)
    return ok and a.lyapunov < STABILITY_MARGIN, sep


def screen_pair(a: AssetDynamics, b: AssetDynamics,
                cfg: ScreenConfig | None = None) -> PairVerdict:
    """Stable iff both members are Lyapunov-stable with bounded divergence.

    Symmetric in its arguments; the verdict names the pair in sorted order.
    """
    cfg = cfg or ScreenConfig()
    first, second = sorted((a, b), key=lambda d: d.name)
    ok_a, sep_a = _member_stable(first, cfg)
    ok_b, sep_b = _member_stable(second, cfg)
    return PairVerdict(
        pair=(first.name, second.name),
        stable=ok_a and ok_b,
        max_separation=max(sep_a, sep_b),
        exponents=(first.lyapunov, second.lyapunov),
    )


def screen_portfolio(assets: list[AssetDynamics], policy: ScreenPolicy | None = None,
                     cfg: ScreenConfig | None = None,
                     label: str = "portfolio") -> StabilityReport:
    """Conjunction of pair verdicts over all pairs or a seeded sample."""
    cfg = cfg or ScreenConfig()
    policy = policy or ScreenPolicy()
    if len(assets) < 2:
        raise TooFewAssets(f"screening needs at least 2 assets, got {len(assets)}")
    if len({a.name for a in assets}) != len(assets):
        raise ValueError("asset names must be unique")

    all_pairs = list(itertools.combinations(sorted(assets, key=lambda d: d.name), 2))
    if policy.kind == "SAMPLED":
        rng = random.Random(policy.seed)
        k = min(policy.k, len(all_pairs))
        chosen = rng.sample(all_pairs, k)
    else:
        chosen = all_pairs

    verdicts = tuple(sorted(
        (screen_pair(a, b, cfg) for a, b in chosen),
        key=lambda v: v.pair,
    ))
    overall = all(v.stable for v in verdicts)
    return StabilityReport(label, policy, verdicts, overall)


def filter_frontier(points: list[FrontierPoint], m: AssetMoments,
                    cfg: ScreenConfig | None = None,
                    policy: ScreenPolicy | None = None,
                    weight_floor: float = 0.01) -> list[AnnotatedFrontierPoint]:
    """Annotate each frontier point with the verdict of screening only the
    assets it actually holds (|weight| above the floor). Points are never
    removed; a point with no screenable asset is flagged vacuous."""
    cfg = cfg or ScreenConfig()
    policy = policy or ScreenPolicy()
    if weight_floor < 0:
        raise ParamOutOfRange("weight_floor must be non-negative")
    dynamics = {d.name: d for d in dynamics_from_moments(m, cfg)}
    names = m.names()

    out = []
    for pt in points:
        held = [dynamics[names[i]] for i, w in enumerate(pt.weights.weights)
                if abs(w) > weight_floor]
        if not held:
            out.append(AnnotatedFrontierPoint(pt, stable=True, vacuous=True))
        elif len(held) == 1:
            verdict = screen_pair(held[0], held[0], cfg)
            out.append(AnnotatedFrontierPoint(pt, stable=verdict.stable, vacuous=False))
        else:
            report = screen_portfolio(held, policy, cfg)
            out.append(AnnotatedFrontierPoint(pt, stable=report.overall, vacuous=False))
    return out


def report_to_dict(report: StabilityReport) -> dict:
    """JSON-ready view of a stability report."""
    return {
        "portfolio": report.portfolio,
        "policy": {
            "type": report.policy.kind,
            "k": report.policy.k,
            "seed": report.policy.seed,
        },
        "verdicts": [
            {
                "pair": list(v.pair),
                "stable": v.stable,
                "max_separation": v.max_separation,
                "exponents": list(v.exponents),
            }
            for v in report.verdicts
        ],
        "overall": report.overall,
    }
