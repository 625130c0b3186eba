"""Constrained mean-variance frontier construction.

Every scenario (long-only, turnover-capped, dollar-neutral, 130/30)
compiles to one dense QP layout: asset weights plus per-asset
absolute-value proxies, a budget equality, an optional target-return
equality, and inequality rows for bounds and exposure caps. A proxy z
with z >= t and z >= -t equals |t| at any optimum that (via the ridge)
penalizes z, which linearizes turnover, gross and short-side caps without
changing the feasible weights.

Sharpe-ratio maximization is solved two independent ways: a homogenized
QP (variables w/excess and 1/excess), and a direct ratio search along the
frontier; the pair cross-checks the tangency construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import qp
from .errors import (
    Infeasible,
    NoExcessReturn,
    NumericalFailure,
    TooManyAssets,
)
from .market_data import AssetMoments
from .mean_variance import FrontierPoint, PortfolioWeights, evaluate

RIDGE_REL = 1e-12        # minimum-norm tie-break, scales with sigma
ACTIVE_SLACK_TOL = 1e-9  # a constraint this close to tight counts as active
KKT_TOL = 1e-8

DEFAULT_GROSS_CAP = 1.0
DEFAULT_MAX_SHORT = 0.3


@dataclass(frozen=True)
class ConstraintSet:
    """Feasible-region description for the solver.

    lower/upper may be scalars, per-asset arrays, or None (unbounded).
    budget is the required weight sum (1 for fully invested, 0 for
    dollar-neutral). turnover_cap bounds (1/2) sum |w - reference|;
    gross_cap bounds sum |w|; max_short_total bounds sum max(-w, 0).
    """

    lower: float | np.ndarray | None = None
    upper: float | np.ndarray | None = None
    budget: float = 1.0
    max_short_total: float | None = None
    turnover_cap: float | None = None
    reference_weights: np.ndarray | None = None
    gross_cap: float | None = None

    def __post_init__(self):
        if self.reference_weights is not None:
            object.__setattr__(
                self,
                "reference_weights",
                np.asarray(self.reference_weights, dtype=float).reshape(-1),
            )
        for name in ("max_short_total", "turnover_cap", "gross_cap"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise ValueError(f"{name} must be non-negative, got {val}")

    @classmethod
    def long_only(cls, budget: float = 1.0) -> "ConstraintSet":
        return cls(lower=0.0, budget=budget)

    @classmethod
    def dollar_neutral(cls, gross_cap: float = DEFAULT_GROSS_CAP) -> "ConstraintSet":
        return cls(budget=0.0, gross_cap=gross_cap)

    @classmethod
    def one_thirty_thirty(cls, max_short_total: float = DEFAULT_MAX_SHORT) -> "ConstraintSet":
        return cls(budget=1.0, max_short_total=max_short_total)

    @classmethod
    def with_turnover(cls, reference_weights, turnover_cap: float,
                      lower=0.0, upper=None, budget: float = 1.0) -> "ConstraintSet":
        return cls(lower=lower, upper=upper, budget=budget,
                   turnover_cap=turnover_cap,
                   reference_weights=np.asarray(reference_weights, dtype=float))


@dataclass(frozen=True)
class TangencyResult:
    """Sharpe-maximal portfolio plus the rate it was measured against."""

    weights: PortfolioWeights
    mu_p: float
    sigma_p: float
    sharpe: float
    r_f: float

    def __post_init__(self):
        if not self.sigma_p > 0:
            raise ValueError("tangency portfolio must carry risk")
        if not np.isfinite(self.sharpe):
            raise ValueError("Sharpe ratio must be finite")


@dataclass(frozen=True)
class CornerPortfolio:
    """Frontier point where the set of binding constraints changes."""

    weights: PortfolioWeights
    mu_p: float
    sigma_p: float
    active_set: tuple[str, ...]


@dataclass
class _Compiled:
    """QP data for one (moments, constraints) pair."""

    n_assets: int
    n_vars: int
    names: tuple[str, ...]
    sigma_lift: np.ndarray   # block-diag(sigma, 0) without ridge
    Q: np.ndarray            # sigma_lift + ridge * I
    ridge: float
    mu: np.ndarray           # length n_assets
    mu_lift: np.ndarray      # [mu, 0 aux]
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_ineq: np.ndarray
    b_ineq: np.ndarray
    tags: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray


def _as_bound(value, n: int, default: float) -> np.ndarray:
    if value is None:
        return np.full(n, default)
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"bound vector has shape {arr.shape}, expected ({n},)")
    return arr.copy()


def _compile(m: AssetMoments, c: ConstraintSet) -> _Compiled:
    n = m.n_assets
    names = m.names()
    lower = _as_bound(c.lower, n, -np.inf)
    upper = _as_bound(c.upper, n, np.inf)
    if np.any(lower > upper):
        raise ValueError("lower bound exceeds upper bound")

    blocks = {"w": (0, n)}
    n_vars = n
    if c.turnover_cap is not None:
        if c.reference_weights is None:
            raise ValueError("turnover_cap needs reference_weights")
        if c.reference_weights.shape != (n,):
            raise ValueError("reference_weights length disagrees with assets")
        blocks["d"] = (n_vars, n_vars + n)
        n_vars += n
    if c.gross_cap is not None:
        blocks["g"] = (n_vars, n_vars + n)
        n_vars += n
    if c.max_short_total is not None:
        blocks["s"] = (n_vars, n_vars + n)
        n_vars += n

    def unit(col):
        row = np.zeros(n_vars)
        row[col] = 1.0
        return row

    A_eq_rows = []
    b_eq = []
    budget_row = np.zeros(n_vars)
    budget_row[:n] = 1.0
    A_eq_rows.append(budget_row)
    b_eq.append(float(c.budget))

    A_rows: list[np.ndarray] = []
    b_vals: list[float] = []
    tags: list[str] = []

    for i in range(n):
        if np.isfinite(lower[i]):
            A_rows.append(unit(i))
            b_vals.append(float(lower[i]))
            tags.append(f"lb[{names[i]}]")
        if np.isfinite(upper[i]):
            A_rows.append(-unit(i))
            b_vals.append(-float(upper[i]))
            tags.append(f"ub[{names[i]}]")

    if "d" in blocks:
        start = blocks["d"][0]
        w0 = c.reference_weights
        for i in range(n):
            row = unit(start + i)
            row[i] = -1.0
            A_rows.append(row)          # d_i - w_i >= -w0_i
            b_vals.append(-float(w0[i]))
            tags.append(f"tw+[{names[i]}]")
            row = unit(start + i)
            row[i] = 1.0
            A_rows.append(row)          # d_i + w_i >= w0_i
            b_vals.append(float(w0[i]))
            tags.append(f"tw-[{names[i]}]")
        cap = np.zeros(n_vars)
        cap[start:start + n] = -1.0
        A_rows.append(cap)              # sum d <= 2 tau
        b_vals.append(-2.0 * float(c.turnover_cap))
        tags.append("turnover")

    if "g" in blocks:
        start = blocks["g"][0]
        for i in range(n):
            row = unit(start + i)
            row[i] = -1.0
            A_rows.append(row)          # g_i >= w_i
            b_vals.append(0.0)
            tags.append(f"gx+[{names[i]}]")
            row = unit(start + i)
            row[i] = 1.0
            A_rows.append(row)          # g_i >= -w_i
            b_vals.append(0.0)
            tags.append(f"gx-[{names[i]}]")
        cap = np.zeros(n_vars)
        cap[start:start + n] = -1.0
        A_rows.append(cap)              # sum g <= G
        b_vals.append(-float(c.gross_cap))
        tags.append("gross")

    if "s" in blocks:
        start = blocks["s"][0]
        for i in range(n):
            A_rows.append(unit(start + i))   # s_i >= 0
            b_vals.append(0.0)
            tags.append(f"sn[{names[i]}]")
            row = unit(start + i)
            row[i] = 1.0
            A_rows.append(row)               # s_i >= -w_i
            b_vals.append(0.0)
            tags.append(f"sp[{names[i]}]")
        cap = np.zeros(n_vars)
        cap[start:start + n] = -1.0
        A_rows.append(cap)                   # sum s <= S
        b_vals.append(-float(c.max_short_total))
        tags.append("short")

    sigma_lift = np.zeros((n_vars, n_vars))
    sigma_lift[:n, :n] = m.sigma
    base = float(np.trace(m.sigma)) / n
    ridge = RIDGE_REL * base if base > 0 else RIDGE_REL
    Q = sigma_lift + ridge * np.eye(n_vars)
    mu_lift = np.zeros(n_vars)
    mu_lift[:n] = m.mu

    return _Compiled(
        n_assets=n,
        n_vars=n_vars,
        names=names,
        sigma_lift=sigma_lift,
        Q=Q,
        ridge=ridge,
        mu=np.asarray(m.mu, dtype=float),
        mu_lift=mu_lift,
        A_eq=np.vstack(A_eq_rows),
        b_eq=np.array(b_eq),
        A_ineq=np.vstack(A_rows) if A_rows else np.zeros((0, n_vars)),
        b_ineq=np.array(b_vals),
        tags=tuple(tags),
        lower=lower,
        upper=upper,
    )


def _with_target(comp: _Compiled, target: float):
    A_eq = np.vstack([comp.A_eq, comp.mu_lift])
    b_eq = np.concatenate([comp.b_eq, [float(target)]])
    return A_eq, b_eq


def _min_variance(comp: _Compiled, target: float | None = None,
                  x0: np.ndarray | None = None) -> qp.QPResult:
    if target is None:
        A_eq, b_eq = comp.A_eq, comp.b_eq
    else:
        A_eq, b_eq = _with_target(comp, target)
    if x0 is None:
        x0 = qp.feasible_point(A_eq, b_eq, comp.A_ineq, comp.b_ineq, comp.n_vars)
    res = qp.solve_qp(comp.Q, np.zeros(comp.n_vars), A_eq, b_eq,
                      comp.A_ineq, comp.b_ineq, x0)
    if res.kkt_residual > KKT_TOL:
        raise NumericalFailure(f"KKT residual {res.kkt_residual:g} above {KKT_TOL:g}")
    return res


def _max_return(comp: _Compiled) -> tuple[float, np.ndarray]:
    try:
        return qp.maximize_linear(comp.mu_lift, comp.A_eq, comp.b_eq,
                                  comp.A_ineq, comp.b_ineq)
    except NumericalFailure as exc:
        raise NumericalFailure(
            "achievable return is unbounded; add bounds or exposure caps"
        ) from exc


def _point(comp: _Compiled, m: AssetMoments, x_lift: np.ndarray,
           label: str | None = None) -> FrontierPoint:
    w = PortfolioWeights(x_lift[:comp.n_assets].copy(), label)
    return evaluate(w, m)


def _active_tags(comp: _Compiled, x_lift: np.ndarray) -> tuple[str, ...]:
    if comp.A_ineq.shape[0] == 0:
        return ()
    slack = comp.A_ineq @ x_lift - comp.b_ineq
    return tuple(tag for tag, s in zip(comp.tags, slack) if s <= ACTIVE_SLACK_TOL)


def min_variance_for_target_return(m: AssetMoments, target_mu: float,
                                   c: ConstraintSet) -> FrontierPoint:
    """Least-risk feasible portfolio with expected return target_mu.

    Raises Infeasible when the target is outside the achievable range.
    """
    comp = _compile(m, c)
    res = _min_variance(comp, target_mu)
    return _point(comp, m, res.x)


def efficient_frontier(m: AssetMoments, c: ConstraintSet,
                       n_points: int = 50) -> list[FrontierPoint]:
    """Minimum-variance portfolios at n_points uniform return targets.

    Targets run from the global-minimum-variance return to the maximum
    achievable return; a degenerate (single-point) range returns one point.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    comp = _compile(m, c)
    res_gmv = _min_variance(comp)
    t_gmv = float(comp.mu_lift @ res_gmv.x)
    t_max, x_max = _max_return(comp)
    if t_max - t_gmv <= 1e-12 * max(1.0, abs(t_max)):
        return [_point(comp, m, res_gmv.x)]

    points = []
    for t in np.linspace(t_gmv, t_max, n_points):
        theta = (t - t_gmv) / (t_max - t_gmv)
        x0 = (1.0 - theta) * res_gmv.x + theta * x_max
        res = _min_variance(comp, t, x0=x0)
        points.append(_point(comp, m, res.x))
    return points


def frontier_with_turnover(m: AssetMoments, c: ConstraintSet,
                           n_points: int = 50) -> list[FrontierPoint]:
    """Efficient frontier under (1/2) sum |w - reference| <= turnover_cap."""
    if c.turnover_cap is None or c.reference_weights is None:
        raise ValueError("constraint set must carry turnover_cap and reference_weights")
    w0 = c.reference_weights
    n = m.n_assets
    if w0.shape != (n,):
        raise ValueError("reference_weights length disagrees with assets")
    lower = _as_bound(c.lower, n, -np.inf)
    upper = _as_bound(c.upper, n, np.inf)
    if abs(float(np.sum(w0)) - c.budget) > 1e-9:
        raise Infeasible("reference weights do not satisfy the budget")
    if np.any(w0 < lower - 1e-12) or np.any(w0 > upper + 1e-12):
        raise Infeasible("reference weights violate the bounds")
    return efficient_frontier(m, c, n_points)


def corner_portfolios(m: AssetMoments, c: ConstraintSet) -> list[CornerPortfolio]:
    """Frontier kinks: points where the binding-constraint set changes.

    Requires finite lower bounds (the long-only setting); between adjacent
    corners the frontier is affine in the return target, so every efficient
    portfolio is a convex combination of its two neighbours.
    """
    lower = _as_bound(c.lower, m.n_assets, -np.inf)
    if not np.all(np.isfinite(lower)):
        raise ValueError("corner enumeration needs finite lower bounds")
    comp = _compile(m, c)
    res_gmv = _min_variance(comp)
    t_gmv = float(comp.mu_lift @ res_gmv.x)
    t_max, x_max = _max_return(comp)

    def solve_at(t):
        theta = 0.0 if t_max == t_gmv else (t - t_gmv) / (t_max - t_gmv)
        x0 = (1.0 - theta) * res_gmv.x + theta * x_max
        return _min_variance(comp, t, x0=x0)

    def corner(t) -> CornerPortfolio:
        res = solve_at(t)
        pt = _point(comp, m, res.x)
        return CornerPortfolio(pt.weights, pt.mu_p, pt.sigma_p,
                               _active_tags(comp, res.x))

    if t_max - t_gmv <= 1e-12 * max(1.0, abs(t_max)):
        return [corner(t_gmv)]

    n_scan = 101
    ts = np.linspace(t_gmv, t_max, n_scan)
    sets = [frozenset(_active_tags(comp, solve_at(t).x)) for t in ts]

    kinks = []
    for i in range(n_scan - 1):
        if sets[i] == sets[i + 1]:
            continue
        lo, hi = ts[i], ts[i + 1]
        set_lo = sets[i]
        while hi - lo > 1e-11 * max(1.0, abs(t_max)):
            mid = 0.5 * (lo + hi)
            if frozenset(_active_tags(comp, solve_at(mid).x)) == set_lo:
                lo = mid
            else:
                hi = mid
        # report the corner on the upper side of the bracket, where the
        # newly binding constraint is tagged active
        kinks.append(hi)

    corners = [corner(t_gmv)] + [corner(t) for t in kinks] + [corner(t_max)]
    deduped: list[CornerPortfolio] = []
    for cp in corners:
        if deduped and abs(cp.mu_p - deduped[-1].mu_p) <= 1e-9 * max(1.0, abs(t_max)):
            deduped[-1] = cp  # same frontier point, keep the later (kink) tags
            continue
        deduped.append(cp)
    return deduped


def _homogenized(comp: _Compiled, r_f: float):
    """Tangency via the classical homogenization: variables (y, k) with
    y = w/excess, k = 1/excess, normalization mu'y - r_f k = 1."""
    n_h = comp.n_vars + 1
    Q = np.zeros((n_h, n_h))
    Q[:comp.n_vars, :comp.n_vars] = comp.sigma_lift
    Q += comp.ridge * np.eye(n_h)
    A_eq = np.hstack([comp.A_eq, -comp.b_eq.reshape(-1, 1)])
    norm_row = np.concatenate([comp.mu_lift, [-r_f]])
    A_eq = np.vstack([A_eq, norm_row])
    b_eq = np.concatenate([np.zeros(comp.A_eq.shape[0]), [1.0]])
    A_ineq = np.hstack([comp.A_ineq, -comp.b_ineq.reshape(-1, 1)])
    return Q, A_eq, b_eq, A_ineq


def _tangency_stats(comp: _Compiled, m: AssetMoments, w: np.ndarray,
                    r_f: float) -> TangencyResult:
    pw = PortfolioWeights(w.copy())
    pt = evaluate(pw, m)
    if pt.sigma_p <= 0:
        raise NumericalFailure("Sharpe maximizer carries no risk; ratio undefined")
    sharpe = (pt.mu_p - r_f) / pt.sigma_p
    return TangencyResult(pw, pt.mu_p, pt.sigma_p, sharpe, r_f)


def _excess_start(comp: _Compiled, r_f: float) -> tuple[float, np.ndarray, bool]:
    """A feasible point with positive excess return, its excess, and whether
    the achievable return is bounded above.

    Raises NoExcessReturn when no feasible portfolio beats r_f.
    """
    try:
        t_max, x_max = _max_return(comp)
    except NumericalFailure:
        # return unbounded above: pin any comfortably positive excess
        target = r_f + max(1.0, abs(r_f))
        A_eq, b_eq = _with_target(comp, target)
        x = qp.feasible_point(A_eq, b_eq, comp.A_ineq, comp.b_ineq, comp.n_vars)
        return target - r_f, x, False
    excess = t_max - r_f
    if excess <= 1e-12 * max(1.0, abs(t_max)):
        raise NoExcessReturn(
            f"every feasible return is at most the risk-free rate {r_f}"
        )
    return excess, x_max, True


def tangency_portfolio(m: AssetMoments, c: ConstraintSet, r_f: float) -> TangencyResult:
    """Feasible portfolio maximizing (w'mu - r_f) / sqrt(w' sigma w).

    Solved exactly as one convex QP through homogenization; with budget 1
    and no bounds this is the normalized inv(sigma) (mu - r_f 1) portfolio.
    """
    comp = _compile(m, c)
    excess, x_start, bounded = _excess_start(comp, r_f)
    Q, A_eq, b_eq, A_ineq = _homogenized(comp, r_f)
    k0 = 1.0 / excess
    # k stays positive: when returns are bounded the maximizer has
    # k = 1/excess(w*) >= 1/excess_max; otherwise only k >= 0 is safe
    floor = 0.5 * k0 if bounded else 0.0
    A_ineq = np.vstack([A_ineq, np.concatenate([np.zeros(comp.n_vars), [1.0]])])
    b_ineq = np.concatenate([np.zeros(comp.A_ineq.shape[0]), [floor]])
    z0 = np.concatenate([x_start * k0, [k0]])
    res = qp.solve_qp(Q, np.zeros(comp.n_vars + 1), A_eq, b_eq, A_ineq, b_ineq, z0)
    if res.kkt_residual > KKT_TOL:
        raise NumericalFailure(f"KKT residual {res.kkt_residual:g} above {KKT_TOL:g}")
    k = float(res.x[-1])
    if k <= 0:
        raise NumericalFailure("homogenized tangency collapsed (k <= 0)")
    return _tangency_stats(comp, m, res.x[:comp.n_assets] / k, r_f)


def max_sharpe_portfolio(m: AssetMoments, c: ConstraintSet, r_f: float) -> TangencyResult:
    """Sharpe maximization by direct ratio search along the frontier.

    Independent of tangency_portfolio: a sweep locates the best return
    target, golden-section refines it, and the binding-constraint face
    found by the search is then solved exactly. Agrees with the
    homogenized construction to solver precision.
    """
    comp = _compile(m, c)
    excess, x_start, bounded = _excess_start(comp, r_f)
    res_gmv = _min_variance(comp)
    t_gmv = float(comp.mu_lift @ res_gmv.x)

    def sharpe_at(t):
        x = _min_variance(comp, t).x
        w = x[:comp.n_assets]
        sig = float(np.sqrt(max(w @ m.sigma @ w, 0.0)))
        if sig <= 0:
            return -np.inf, x
        return (t - r_f) / sig, x

    if bounded:
        t_max = r_f + excess
        if t_max - t_gmv <= 1e-12 * max(1.0, abs(t_max)):
            return _tangency_stats(comp, m, res_gmv.x[:comp.n_assets], r_f)
        ts = list(np.linspace(t_gmv, t_max, 65))
    else:
        # no return ceiling: probe a doubling grid; Sharpe is unimodal and
        # its maximum is finite, so the grid brackets it
        ts = [t_gmv]
        delta = max(1e-3, 0.01 * max(1.0, abs(t_gmv)))
        while delta < 1e6:
            ts.append(t_gmv + delta)
            delta *= 2.0
    sharpes = [sharpe_at(t)[0] for t in ts]
    best = int(np.argmax(sharpes))
    lo = ts[max(best - 1, 0)]
    hi = ts[min(best + 1, len(ts) - 1)]

    # golden-section on the unimodal Sharpe profile
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, _ = sharpe_at(x1)
    f2, _ = sharpe_at(x2)
    for _ in range(90):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1, _ = sharpe_at(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2, _ = sharpe_at(x2)
        if b - a <= 1e-14 * max(1.0, abs(hi)):
            break
    t_hat = 0.5 * (a + b)
    s_hat, x_hat = sharpe_at(t_hat)

    polished = _polish_face(comp, m, r_f, x_hat)
    if polished is not None and polished[0] >= s_hat - 1e-12:
        return _tangency_stats(comp, m, polished[1], r_f)
    return _tangency_stats(comp, m, x_hat[:comp.n_assets], r_f)


def _polish_face(comp: _Compiled, m: AssetMoments, r_f: float,
                 x_hat: np.ndarray):
    """Exact Sharpe maximizer on the binding-constraint face at x_hat.

    Returns (sharpe, weights) or None when the face solve leaves the
    feasible set (wrong face identified)."""
    n_h = comp.n_vars + 1
    Q = np.zeros((n_h, n_h))
    Q[:comp.n_vars, :comp.n_vars] = comp.sigma_lift
    Q += comp.ridge * np.eye(n_h)

    rows = [np.hstack([comp.A_eq, -comp.b_eq.reshape(-1, 1)])]
    if comp.A_ineq.shape[0]:
        slack = comp.A_ineq @ x_hat - comp.b_ineq
        active = slack <= ACTIVE_SLACK_TOL
        if np.any(active):
            rows.append(np.hstack([
                comp.A_ineq[active], -comp.b_ineq[active].reshape(-1, 1)
            ]))
    rows.append(np.concatenate([comp.mu_lift, [-r_f]])[None, :])
    A = np.vstack(rows)
    rhs = np.zeros(A.shape[0])
    rhs[-1] = 1.0

    nv = n_h
    kkt = np.zeros((nv + A.shape[0], nv + A.shape[0]))
    kkt[:nv, :nv] = Q
    kkt[:nv, nv:] = -A.T
    kkt[nv:, :nv] = A
    try:
        sol = np.linalg.solve(kkt, np.concatenate([np.zeros(nv), rhs]))
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(kkt, np.concatenate([np.zeros(nv), rhs]), rcond=None)[0]
    z = sol[:nv]
    k = float(z[-1])
    if k <= 0:
        return None
    x = z[:comp.n_vars] / k
    if comp.A_ineq.shape[0]:
        if np.min(comp.A_ineq @ x - comp.b_ineq, initial=0.0) < -ACTIVE_SLACK_TOL:
            return None
    if np.max(np.abs(comp.A_eq @ x - comp.b_eq), initial=0.0) > ACTIVE_SLACK_TOL:
        return None
    w = x[:comp.n_assets]
    sig = float(np.sqrt(max(w @ m.sigma @ w, 0.0)))
    if sig <= 0:
        return None
    return (float(w @ comp.mu) - r_f) / sig, w


def dollar_neutral_optimize(m: AssetMoments, c: ConstraintSet,
                            target_mu: float | None = None) -> FrontierPoint:
    """Zero-net-weight portfolio under a gross-exposure cap.

    target_mu None means maximum-return mode (least-variance portfolio
    among return maximizers). The gross cap defaults to 1.
    """
    if c.budget != 0.0:
        raise ValueError("dollar-neutral optimization needs budget = 0")
    if c.gross_cap is None:
        c = replace(c, gross_cap=DEFAULT_GROSS_CAP)
    comp = _compile(m, c)
    if target_mu is None:
        target_mu, _ = _max_return(comp)
    res = _min_variance(comp, target_mu)
    w = res.x[:comp.n_assets]
    if abs(float(np.sum(w))) > 1e-10:
        raise NumericalFailure("net weight drifted from zero")
    if float(np.sum(np.abs(w))) > c.gross_cap + 1e-10:
        raise NumericalFailure("gross exposure exceeded the cap")
    return _point(comp, m, res.x)


def optimize_130_30(m: AssetMoments, c: ConstraintSet,
                    target_mu: float | None = None) -> FrontierPoint:
    """Budget-1 portfolio with total short exposure capped (default 0.3)."""
    if c.budget != 1.0:
        raise ValueError("130/30 optimization needs budget = 1")
    if c.max_short_total is None:
        c = replace(c, max_short_total=DEFAULT_MAX_SHORT)
    comp = _compile(m, c)
    if target_mu is None:
        target_mu, _ = _max_return(comp)
    res = _min_variance(comp, target_mu)
    w = res.x[:comp.n_assets]
    if abs(float(np.sum(w)) - 1.0) > 1e-10:
        raise NumericalFailure("budget drifted from one")
    if float(np.sum(np.maximum(-w, 0.0))) > c.max_short_total + 1e-10:
        raise NumericalFailure("short exposure exceeded the cap")
    return _point(comp, m, res.x)


def grid_oracle(m: AssetMoments, c: ConstraintSet, target_mu: float,
                step: float) -> FrontierPoint:
    """Exhaustive search over the discretized feasible set (N <= 4).

    The first N-1 weights run on a grid of the given step inside the
    effective box; the last weight absorbs the budget exactly. A candidate
    matches the target when |w'mu - target| <= step/2 times the summed
    return spread, the tightest guarantee the lattice supports. Verification
    oracle only; brutally slower than the QP route.
    """
    n = m.n_assets
    if n > 4:
        raise TooManyAssets(f"grid oracle handles at most 4 assets, got {n}")
    if step < 0.001:
        raise ValueError("step below 0.001 explodes the lattice")
    lower, upper = _effective_box(m, c)
    mu = np.asarray(m.mu, dtype=float)

    if n == 1:
        w = np.array([c.budget])
        if w[0] < lower[0] - 1e-12 or w[0] > upper[0] + 1e-12:
            raise Infeasible("budget breaks the single asset's bounds")
        if abs(float(mu @ w) - target_mu) > 1e-9 * max(1.0, abs(target_mu)):
            raise Infeasible("single-asset return misses the target")
        return evaluate(PortfolioWeights(w), m)

    spread = float(np.sum(np.abs(mu[:-1] - mu[-1])))
    tol_ret = 0.5 * step * spread + 1e-12

    axes = []
    for i in range(n - 1):
        count = int(np.floor((upper[i] - lower[i]) / step + 1e-9)) + 1
        axes.append(lower[i] + step * np.arange(count))

    best_var = np.inf
    best_w = None
    first_axis = axes[0]
    rest = axes[1:]
    mesh_rest = np.meshgrid(*rest, indexing="ij") if rest else []
    flat_rest = [g.reshape(-1) for g in mesh_rest]

    for w1 in first_axis:
        if flat_rest:
            cols = [np.full(flat_rest[0].shape, w1)] + flat_rest
        else:
            cols = [np.array([w1])]
        partial = np.stack(cols, axis=1)
        last = c.budget - partial.sum(axis=1)
        ok = (last >= lower[-1] - 1e-12) & (last <= upper[-1] + 1e-12)
        if not np.any(ok):
            continue
        w_all = np.hstack([partial[ok], last[ok, None]])
        ret = w_all @ mu
        ok2 = np.abs(ret - target_mu) <= tol_ret
        if not np.any(ok2):
            continue
        w_all = w_all[ok2]
        w_all = w_all[_caps_ok(w_all, c)]
        if w_all.shape[0] == 0:
            continue
        variances = np.einsum("ij,jk,ik->i", w_all, m.sigma, w_all)
        i = int(np.argmin(variances))
        if variances[i] < best_var:
            best_var = float(variances[i])
            best_w = w_all[i].copy()

    if best_w is None:
        raise Infeasible("no lattice portfolio reaches the target")
    return evaluate(PortfolioWeights(best_w), m)


def _caps_ok(w_all: np.ndarray, c: ConstraintSet) -> np.ndarray:
    ok = np.ones(w_all.shape[0], dtype=bool)
    if c.turnover_cap is not None:
        dist = 0.5 * np.sum(np.abs(w_all - c.reference_weights[None, :]), axis=1)
        ok &= dist <= c.turnover_cap + 1e-12
    if c.gross_cap is not None:
        ok &= np.sum(np.abs(w_all), axis=1) <= c.gross_cap + 1e-12
    if c.max_short_total is not None:
        ok &= np.sum(np.maximum(-w_all, 0.0), axis=1) <= c.max_short_total + 1e-12
    return ok


def _effective_box(m: AssetMoments, c: ConstraintSet) -> tuple[np.ndarray, np.ndarray]:
    n = m.n_assets
    lower = _as_bound(c.lower, n, -np.inf)
    upper = _as_bound(c.upper, n, np.inf)
    if c.gross_cap is not None:
        lower = np.maximum(lower, -c.gross_cap)
        upper = np.minimum(upper, c.gross_cap)
    if c.max_short_total is not None:
        lower = np.maximum(lower, -c.max_short_total)
        upper = np.minimum(upper, c.budget + c.max_short_total)
    if c.turnover_cap is not None and c.reference_weights is not None:
        lower = np.maximum(lower, c.reference_weights - 2.0 * c.turnover_cap)
        upper = np.minimum(upper, c.reference_weights + 2.0 * c.turnover_cap)
    if np.all(np.isfinite(lower)):
        # budget minus everyone else's floor caps each weight from above
        implied = c.budget - (np.sum(lower) - lower)
        upper = np.minimum(upper, implied)
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError("grid oracle needs a bounded feasible box")
    return lower, upper
