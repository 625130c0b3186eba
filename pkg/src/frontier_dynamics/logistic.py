"""Logistic-map engine: iteration, fixed-point algebra, bifurcation
diagrams, period-doubling detection and Feigenbaum-ratio estimation.

The map is x_{n+1} = r x_n (1 - x_n) on [0, 1] for 0 < r <= 4. The
conjugate quadratic form y_{n+1} = 1 - lam y_n^2 on [-1, 1] is supported
through the exact parameter bridge lam = (r^2 - 2r) / 4.

Period-doubling parameters are refined by bisection on detected-period
transitions. Near a doubling point the attracting cycle loses contraction
(critical slowing down), so the transient budget grows inversely with the
bracket width; a fixed budget would bias every boundary estimate low.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    ComputationError,
    NoDoublingFound,
    NoRealCycle,
    ParamOutOfRange,
    TooFewBifurcations,
)

CHAOTIC = "CHAOTIC"  # detect_period verdict when no period <= max fits

FEIGENBAUM_DELTA = 4.669201609   # universal doubling-ratio limit
CASCADE_CAP = 3.5699             # accumulation point of the cascade (2 s.f. beyond detector reach)

MAX_DETECT_PERIOD = 64
DETECT_TOL = 1e-6
DETECT_WINDOW = 256

_SCAN_TRANSIENT = 20_000         # coarse-grid scan burn-in
_BISECT_TRANSIENT_L1 = 1_000_000  # classification floor at the first doubling
_BISECT_TRANSIENT = 400_000      # floor deeper in the cascade (multiplier
                                 # sensitivity grows ~5x per level)
_BUDGET_SCALE = 80.0             # transients ~ scale / bracket width
_MAX_TRANSIENT = 8_000_000


@dataclass(frozen=True)
class MapParams:
    """Control parameter and seed; orbits stay in [0, 1]."""

    r: float
    x0: float

    def __post_init__(self):
        if not (0.0 < self.r <= 4.0):
            raise ParamOutOfRange(f"r must be in (0, 4], got {self.r}")
        if not (0.0 < self.x0 < 1.0):
            raise ParamOutOfRange(f"x0 must be in (0, 1), got {self.x0}")


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray
    params: MapParams


@dataclass(frozen=True)
class QuadraticMapParams:
    """Parameters of y_{n+1} = 1 - lam y_n^2; orbits stay in [-1, 1]."""

    lam: float
    x0: float

    def __post_init__(self):
        if not (0.0 <= self.lam <= 2.0):
            raise ParamOutOfRange(f"lambda must be in [0, 2], got {self.lam}")
        if not (-1.0 <= self.x0 <= 1.0):
            raise ParamOutOfRange(f"x0 must be in [-1, 1], got {self.x0}")


@dataclass(frozen=True)
class QuadraticTrajectory:
    states: np.ndarray
    params: QuadraticMapParams


@dataclass(frozen=True)
class BifurcationDiagram:
    """Per-parameter attractor samples on a uniform grid."""

    r_grid: np.ndarray
    attractor_points: np.ndarray  # shape (len(r_grid), n_keep)
    x0: float
    n_transient: int


@dataclass(frozen=True)
class BifurcationSequence:
    """Detected period-doubling parameters b_1 < b_2 < ... with the scan
    metadata that produced them."""

    b: tuple[float, ...]
    coarse_step: float
    refine_tol: float

    def __post_init__(self):
        for x, y in zip(self.b, self.b[1:]):
            if y <= x:
                raise ValueError("doubling parameters must increase strictly")
        if self.b and self.b[-1] > CASCADE_CAP + max(self.refine_tol, 1e-4):
            raise ValueError("doubling parameter beyond the cascade cap")


@dataclass(frozen=True)
class FeigenbaumEstimate:
    ratios: tuple[float, ...]
    reference: float = FEIGENBAUM_DELTA

    def __post_init__(self):
        if any(not np.isfinite(r) or r <= 0 for r in self.ratios):
            raise ValueError("ratios must be finite and positive")


def iterate_logistic(params: MapParams, n: int) -> Trajectory:
    """Orbit x_0 ... x_n of the logistic map."""
    if n < 1:
        raise ParamOutOfRange(f"n must be >= 1, got {n}")
    r = params.r
    states = np.empty(n + 1)
    x = params.x0
    states[0] = x
    for k in range(1, n + 1):
        x = r * x * (1.0 - x)
        states[k] = x
    return Trajectory(states, params)


def iterate_quadratic_form(lam: float, x0: float, n: int) -> QuadraticTrajectory:
    """Orbit of the quadratic form y_{n+1} = 1 - lam y_n^2."""
    params = QuadraticMapParams(lam, x0)
    if n < 1:
        raise ParamOutOfRange(f"n must be >= 1, got {n}")
    states = np.empty(n + 1)
    y = x0
    states[0] = y
    for k in range(1, n + 1):
        y = 1.0 - lam * y * y
        states[k] = y
    return QuadraticTrajectory(states, params)


def convert_parameter(r: float) -> float:
    """Bridge the two parameterizations: lam = (r^2 - 2r) / 4.

    The affine change of coordinates y = 4(x - 1/2)/(r - 2) carries
    logistic orbits at r onto quadratic-form orbits at this lam. Values
    below r = 2 give negative lam, outside the quadratic form's domain.
    """
    if not (0.0 < r <= 4.0):
        raise ParamOutOfRange(f"r must be in (0, 4], got {r}")
    return (r * r - 2.0 * r) / 4.0


def conjugate_state(r: float, x: float) -> float:
    """Map a logistic state to its quadratic-form image y = 4(x - 1/2)/(r - 2)."""
    if not (0.0 < r <= 4.0):
        raise ParamOutOfRange(f"r must be in (0, 4], got {r}")
    if abs(r - 2.0) < 1e-12:
        raise ParamOutOfRange("conjugacy degenerates at r = 2 (lam = 0)")
    return 4.0 * (x - 0.5) / (r - 2.0)


def fixed_points(r: float) -> tuple[float, ...]:
    """Roots of x = r x (1 - x): the origin, plus 1 - 1/r once r > 1.

    Below r = 1 the second root is negative (not a physical state) and at
    r = 1 it collapses onto the origin, so only the origin is reported.
    """
    if r <= 0:
        raise ParamOutOfRange(f"r must be positive, got {r}")
    if r <= 1.0:
        return (0.0,)
    return (0.0, 1.0 - 1.0 / r)


def multiplier_at(r: float, x: float) -> float:
    """Map derivative f'(x) = r - 2 r x; |f'| < 1 means a stable point."""
    if not (0.0 < r <= 4.0):
        raise ParamOutOfRange(f"r must be in (0, 4], got {r}")
    return r - 2.0 * r * x


def period2_points(r: float) -> tuple[float, float]:
    """The two-cycle (1 + r +/- sqrt((r-3)(r+1))) / (2r), larger point first.

    Real and distinct only beyond r = 3; at r = 3 the pair degenerates into
    the fixed point 2/3.
    """
    if not (0.0 < r <= 4.0):
        raise ParamOutOfRange(f"r must be in (0, 4], got {r}")
    if r <= 3.0:
        raise NoRealCycle(f"no real two-cycle at r = {r} (needs r > 3)")
    s = np.sqrt((r - 3.0) * (r + 1.0))
    return ((1.0 + r + s) / (2.0 * r), (1.0 + r - s) / (2.0 * r))


def period2_multiplier(r: float) -> float:
    """Two-cycle multiplier f'(x1) f'(x2) = -r^2 + 2r + 4.

    Crosses -1 exactly at r = 1 + sqrt(6), the period-4 onset.
    """
    if not (0.0 < r <= 4.0):
        raise ParamOutOfRange(f"r must be in (0, 4], got {r}")
    if r <= 3.0:
        raise NoRealCycle(f"no real two-cycle at r = {r} (needs r > 3)")
    return -r * r + 2.0 * r + 4.0


def attractor_sample(r: float, x0: float, n_transient: int, n_keep: int) -> np.ndarray:
    """Discard the first n_transient iterates, return the next n_keep."""
    MapParams(r, x0)  # validates the parameter range
    if n_transient < 1 or n_keep < 1:
        raise ParamOutOfRange("n_transient and n_keep must be >= 1")
    x = x0
    for _ in range(n_transient):
        x = r * x * (1.0 - x)
    out = np.empty(n_keep)
    for k in range(n_keep):
        x = r * x * (1.0 - x)
        out[k] = x
    return out


def bifurcation_diagram(r_min: float, r_max: float, n_r: int, x0: float = 0.5,
                        n_transient: int = 1000, n_keep: int = 400) -> BifurcationDiagram:
    """Attractor samples over a uniform parameter grid (diagram raw data)."""
    if not (0.0 < r_min < r_max <= 4.0):
        raise ParamOutOfRange(f"need 0 < r_min < r_max <= 4, got [{r_min}, {r_max}]")
    if n_r < 2:
        raise ParamOutOfRange("n_r must be >= 2")
    if not (0.0 < x0 < 1.0):
        raise ParamOutOfRange(f"x0 must be in (0, 1), got {x0}")
    if n_transient < 1 or n_keep < 1:
        raise ParamOutOfRange("n_transient and n_keep must be >= 1")
    grid = np.linspace(r_min, r_max, n_r)
    x = np.full(n_r, x0)
    for _ in range(n_transient):
        x = grid * x * (1.0 - x)
    points = np.empty((n_r, n_keep))
    for k in range(n_keep):
        x = grid * x * (1.0 - x)
        points[:, k] = x
    return BifurcationDiagram(grid, points, x0, n_transient)


def detect_period(states, tol: float = DETECT_TOL,
                  max_period: int = MAX_DETECT_PERIOD,
                  window: int = DETECT_WINDOW) -> Union[int, str]:
    """Smallest p with |x_{k+p} - x_k| < tol across the tail, else CHAOTIC."""
    states = np.asarray(states, dtype=float)
    if states.shape[0] < 4 * max_period:
        raise ParamOutOfRange(
            f"need at least {4 * max_period} samples, got {states.shape[0]}"
        )
    tail = states[-window:] if states.shape[0] > window else states
    for p in range(1, max_period + 1):
        if np.max(np.abs(tail[p:] - tail[:-p])) < tol:
            return p
    return CHAOTIC


def _tail_period(r: float, x0: float, n_transient: int) -> Union[int, str]:
    """detect_period after a scalar burn-in of n_transient steps."""
    x = x0
    for _ in range(n_transient):
        x = r * x * (1.0 - x)
    n = DETECT_WINDOW + MAX_DETECT_PERIOD
    tail = np.empty(n)
    for k in range(n):
        x = r * x * (1.0 - x)
        tail[k] = x
    return detect_period(tail)


def _budget(width: float, level: int = 1) -> int:
    floor = _BISECT_TRANSIENT_L1 if level == 1 else _BISECT_TRANSIENT
    return min(_MAX_TRANSIENT, max(floor, int(_BUDGET_SCALE / width)))


def _periods_on_grid(grid: np.ndarray, x0: float, n_transient: int) -> list:
    """Vectorized detect_period over a parameter grid."""
    x = np.full(grid.shape[0], x0)
    for _ in range(n_transient):
        x = grid * x * (1.0 - x)
    n = DETECT_WINDOW + MAX_DETECT_PERIOD
    tails = np.empty((n, grid.shape[0]))
    for k in range(n):
        x = grid * x * (1.0 - x)
        tails[k] = x
    return [detect_period(tails[:, i]) for i in range(grid.shape[0])]


def _leq(period, p: int) -> bool:
    return period != CHAOTIC and period <= p


def detect_bifurcations(r_min: float, r_max: float, coarse_step: float = 0.002,
                        refine_tol: float = 1e-5, x0: float = 0.5) -> BifurcationSequence:
    """Locate the period-doubling parameters inside [r_min, r_max].

    A coarse detect_period scan establishes which doubling levels the range
    crosses; each level's boundary is then bisected on the period transition
    with a transient budget that scales inversely with the bracket width
    (contraction vanishes at the boundary, so narrow brackets need long
    burn-ins). Detectable levels stop at period 64, three octaves short of
    the cascade cap.
    """
    if not (2.9 < r_min < r_max <= CASCADE_CAP + 1e-4):
        raise ParamOutOfRange(
            f"scan range must sit inside (2.9, {CASCADE_CAP}], got [{r_min}, {r_max}]"
        )
    if coarse_step <= 0 or refine_tol <= 0:
        raise ParamOutOfRange("coarse_step and refine_tol must be positive")
    if not (0.0 < x0 < 1.0):
        raise ParamOutOfRange(f"x0 must be in (0, 1), got {x0}")

    n_grid = max(int(np.ceil((r_max - r_min) / coarse_step)) + 1, 2)
    grid = np.linspace(r_min, r_max, n_grid)
    coarse = _periods_on_grid(grid, x0, _SCAN_TRANSIENT)

    start = _tail_period(r_min, x0, _budget(coarse_step))
    if start == CHAOTIC:
        raise NoDoublingFound(
            f"period at r_min = {r_min} is already beyond the detector"
        )
    solid_max = _tail_period(r_max, x0, _budget(max(refine_tol * 4, 1e-6)))

    boundaries: list[float] = []
    level = int(start)
    lo = r_min
    while level <= MAX_DETECT_PERIOD:
        if _leq(solid_max, level):
            break  # the range tops out at this period: no further doubling
        # seed the bracket from the coarse scan. Its misreads live in the
        # slow-decay zone BELOW a boundary (where the doubled period is
        # mimicked), so flips can only appear early: pad the upper end by a
        # margin wider than that blur zone, and back the lower end off by
        # the same margin.
        hi = r_max
        margin = max(2.0 * coarse_step, 1e-3)
        for i in range(n_grid):
            if grid[i] <= lo:
                continue
            if _leq(coarse[i], level):
                lo = max(lo, grid[i] - margin)
            else:
                hi = min(r_max, grid[i] + margin)
                break
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            if _leq(_tail_period(mid, x0, _budget(hi - lo, level)), level):
                lo = mid
            else:
                hi = mid
        b = 0.5 * (lo + hi)
        boundaries.append(b)
        lo = b
        level *= 2

    if not boundaries:
        raise NoDoublingFound(f"no period-doubling inside [{r_min}, {r_max}]")
    return BifurcationSequence(tuple(boundaries), coarse_step, refine_tol)


def feigenbaum_ratio(seq: BifurcationSequence) -> FeigenbaumEstimate:
    """Successive interval ratios (b_n - b_{n-1}) / (b_{n+1} - b_n)."""
    if len(seq.b) < 3:
        raise TooFewBifurcations(
            f"need at least 3 doubling parameters, got {len(seq.b)}"
        )
    b = seq.b
    ratios = tuple(
        (b[i + 1] - b[i]) / (b[i + 2] - b[i + 1]) for i in range(len(b) - 2)
    )
    return FeigenbaumEstimate(ratios)


def find_chaos_onset(r_min: float = 3.5, r_max: float = 3.6, r_step: float = 1e-4,
                     x0: float = 0.5, n_transient: int = 500_000) -> float:
    """Smallest grid parameter whose attractor defeats period detection.

    With the detector capped at period 64 this lands at the 64 -> 128
    doubling, just below the cascade's accumulation point.
    """
    if not (0.0 < r_min < r_max <= 4.0):
        raise ParamOutOfRange(f"need 0 < r_min < r_max <= 4, got [{r_min}, {r_max}]")
    if r_step <= 0:
        raise ParamOutOfRange("r_step must be positive")
    count = int(round((r_max - r_min) / r_step)) + 1
    grid = np.linspace(r_min, r_max, count)
    periods = _periods_on_grid(grid, x0, n_transient)
    for r, p in zip(grid, periods):
        if p == CHAOTIC:
            return float(r)
    raise ComputationError(f"no chaotic parameter on the grid [{r_min}, {r_max}]")
