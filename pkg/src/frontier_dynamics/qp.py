"""Dense primal active-set solver for convex quadratic programs.

    minimize    (1/2) x' Q x + c' x
    subject to  A_eq x = b_eq
                A_ineq x >= b_ineq

Q must be positive definite; callers regularize positive semi-definite
Hessians with a small ridge, which doubles as a deterministic minimum-norm
tie-break. The iteration is the classical working-set scheme: solve the
equality-constrained subproblem on the current working set, step as far as
feasibility allows, add the blocking row, and once stationary drop the row
with the most negative multiplier. Feasible starting points come from an
LP (scipy's HiGHS) solved on the same rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import Infeasible, NumericalFailure

STEP_TOL = 1e-11
DUAL_TOL = 1e-9
RATIO_TOL = 1e-13


@dataclass(frozen=True)
class QPResult:
    x: np.ndarray
    working_set: tuple[int, ...]      # inequality rows held as equalities
    lambda_eq: np.ndarray
    lambda_ineq: np.ndarray           # full length, zero off the working set
    iterations: int
    kkt_residual: float


def feasible_point(A_eq, b_eq, A_ineq, b_ineq, n: int) -> np.ndarray:
    """Any point of the polytope, via a zero-objective LP.

    Raises Infeasible when the polytope is empty.
    """
    res = linprog(
        np.zeros(n),
        A_ub=None if A_ineq is None or len(A_ineq) == 0 else -np.asarray(A_ineq),
        b_ub=None if b_ineq is None or len(b_ineq) == 0 else -np.asarray(b_ineq),
        A_eq=None if A_eq is None or len(A_eq) == 0 else np.asarray(A_eq),
        b_eq=None if b_eq is None or len(b_eq) == 0 else np.asarray(b_eq),
        bounds=[(None, None)] * n,
        method="highs",
    )
    if res.status == 2:
        raise Infeasible("constraint set is empty")
    if res.status != 0:
        raise NumericalFailure(f"phase-1 LP failed: {res.message}")
    return np.asarray(res.x, dtype=float)


def maximize_linear(obj, A_eq, b_eq, A_ineq, b_ineq) -> tuple[float, np.ndarray]:
    """max obj' x over the polytope; (value, argmax).

    Raises Infeasible on an empty polytope and NumericalFailure when the
    objective is unbounded above.
    """
    obj = np.asarray(obj, dtype=float)
    res = linprog(
        -obj,
        A_ub=None if A_ineq is None or len(A_ineq) == 0 else -np.asarray(A_ineq),
        b_ub=None if b_ineq is None or len(b_ineq) == 0 else -np.asarray(b_ineq),
        A_eq=None if A_eq is None or len(A_eq) == 0 else np.asarray(A_eq),
        b_eq=None if b_eq is None or len(b_eq) == 0 else np.asarray(b_eq),
        bounds=[(None, None)] * obj.shape[0],
        method="highs",
    )
    if res.status == 2:
        raise Infeasible("constraint set is empty")
    if res.status == 3:
        raise NumericalFailure("linear objective is unbounded on this constraint set")
    if res.status != 0:
        raise NumericalFailure(f"LP failed: {res.message}")
    x = np.asarray(res.x, dtype=float)
    return float(obj @ x), x


def _solve_eqp(Q, c, A_act, b_act, n_eq_rows):
    """Equality-constrained subproblem via the bordered KKT system.

    Returns (x, multipliers) where multipliers align with A_act rows.
    """
    n = Q.shape[0]
    m = A_act.shape[0]
    if m == 0:
        return np.linalg.solve(Q, -c), np.empty(0)
    # multiplier convention: Q x - A' lam = -c, so lam_ineq >= 0 at optimum
    kkt = np.zeros((n + m, n + m))
    kkt[:n, :n] = Q
    kkt[:n, n:] = -A_act.T
    kkt[n:, :n] = A_act
    rhs = np.concatenate([-c, b_act])
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    return sol[:n], sol[n:]


def solve_qp(
    Q,
    c,
    A_eq,
    b_eq,
    A_ineq,
    b_ineq,
    x0,
    max_iter: int | None = None,
) -> QPResult:
    """Minimize the quadratic from a feasible x0. See the module docstring."""
    Q = np.asarray(Q, dtype=float)
    c = np.asarray(c, dtype=float)
    n = Q.shape[0]
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.atleast_1d(np.asarray(b_eq, dtype=float))
    A_ineq = np.zeros((0, n)) if A_ineq is None else np.atleast_2d(np.asarray(A_ineq, dtype=float))
    b_ineq = np.zeros(0) if b_ineq is None else np.atleast_1d(np.asarray(b_ineq, dtype=float))
    if max_iter is None:
        max_iter = 10 * n * n + 100

    x = np.array(x0, dtype=float)
    working: list[int] = []
    n_eq = A_eq.shape[0]
    lam_act = np.empty(0)

    for iteration in range(1, max_iter + 1):
        A_act = np.vstack([A_eq, A_ineq[working]]) if (n_eq or working) else np.zeros((0, n))
        b_act = np.concatenate([b_eq, b_ineq[working]])
        x_new, lam_act = _solve_eqp(Q, c, A_act, b_act, n_eq)
        p = x_new - x
        scale = max(1.0, float(np.max(np.abs(x))))

        if np.max(np.abs(p), initial=0.0) <= STEP_TOL * scale:
            lam_ineq_act = lam_act[n_eq:]
            if lam_ineq_act.size == 0 or np.min(lam_ineq_act) >= -DUAL_TOL:
                return _finish(Q, c, A_eq, b_eq, A_ineq, b_ineq, x, working,
                               lam_act, n_eq, iteration)
            drop = int(np.argmin(lam_ineq_act))
            del working[drop]
            continue

        # longest feasible step toward the subproblem solution
        alpha = 1.0
        blocking = -1
        if A_ineq.shape[0]:
            direction = A_ineq @ p
            slack = A_ineq @ x - b_ineq
            for i in range(A_ineq.shape[0]):
                if i in working:
                    continue
                if direction[i] < -RATIO_TOL * max(1.0, abs(slack[i])):
                    ratio = max(slack[i], 0.0) / (-direction[i])
                    if ratio < alpha - 1e-15:
                        alpha = ratio
                        blocking = i
        x = x + min(max(alpha, 0.0), 1.0) * p
        if blocking >= 0 and alpha < 1.0:
            working.append(blocking)

    raise NumericalFailure(f"active-set iteration cap {max_iter} reached")


def _finish(Q, c, A_eq, b_eq, A_ineq, b_ineq, x, working, lam_act, n_eq, iters):
    lambda_eq = lam_act[:n_eq].copy()
    lambda_ineq = np.zeros(A_ineq.shape[0])
    for slot, row in enumerate(working):
        lambda_ineq[row] = lam_act[n_eq + slot]
    residual = kkt_residual(Q, c, A_eq, b_eq, A_ineq, b_ineq, x, lambda_eq, lambda_ineq)
    return QPResult(x, tuple(working), lambda_eq, lambda_ineq, iters, residual)


def kkt_residual(Q, c, A_eq, b_eq, A_ineq, b_ineq, x, lambda_eq, lambda_ineq) -> float:
    """Worst violation across stationarity, feasibility, dual sign and
    complementary slackness."""
    stat = Q @ x + c
    if A_eq.shape[0]:
        stat = stat - A_eq.T @ lambda_eq
    if A_ineq.shape[0]:
        stat = stat - A_ineq.T @ lambda_ineq
    worst = float(np.max(np.abs(stat), initial=0.0))
    if A_eq.shape[0]:
        worst = max(worst, float(np.max(np.abs(A_eq @ x - b_eq))))
    if A_ineq.shape[0]:
        slack = A_ineq @ x - b_ineq
        worst = max(worst, float(np.max(-slack, initial=0.0)))
        worst = max(worst, float(np.max(-lambda_ineq, initial=0.0)))
        worst = max(worst, float(np.max(np.abs(lambda_ineq * slack), initial=0.0)))
    return worst
