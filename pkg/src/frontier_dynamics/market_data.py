"""Return-series ingestion and moment estimation.

The input contract is a UTF-8 CSV with header ``date,<asset1>,...,<assetN>``,
ISO-8601 dates, and simple per-period returns as decimal fractions (0.01 is
one percent). Moments are the plain sample estimators: column means and the
unbiased (T-1 denominator) covariance.
"""

from __future__ import annotations

import csv
import datetime
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateAsset,
    DuplicateAssetName,
    MalformedCsv,
    MissingCell,
    NonMonotoneDates,
    ReturnOutOfRange,
    TooFewObservations,
    UnparseableDate,
    UnparseableNumber,
)

RETURN_BOUND = 10.0  # |return| beyond this is percent-vs-decimal confusion


@dataclass(frozen=True)
class ReturnSeries:
    """A T x N panel of per-period simple returns.

    Validated on construction: unique non-empty asset names, strictly
    increasing dates, no missing cells, every |return| < 10, T >= 2.
    """

    asset_names: tuple[str, ...]
    dates: tuple[datetime.date, ...]
    returns: np.ndarray

    def __post_init__(self):
        returns = np.asarray(self.returns, dtype=float)
        object.__setattr__(self, "returns", returns)
        if returns.ndim != 2:
            raise MalformedCsv("returns must be a T x N matrix")
        t, n = returns.shape
        if n < 1 or len(self.asset_names) != n:
            raise MalformedCsv(
                f"{len(self.asset_names)} asset names for {n} return columns"
            )
        if any(not name for name in self.asset_names):
            raise DuplicateAssetName("asset names must be non-empty")
        if len(set(self.asset_names)) != n:
            raise DuplicateAssetName(f"duplicate asset name in {self.asset_names}")
        if t < 2:
            raise TooFewObservations(f"need at least 2 rows, got {t}")
        if len(self.dates) != t:
            raise MalformedCsv(f"{len(self.dates)} dates for {t} rows")
        for i in range(1, t):
            if self.dates[i] <= self.dates[i - 1]:
                raise NonMonotoneDates(
                    f"date {self.dates[i]} at row {i + 1} does not follow "
                    f"{self.dates[i - 1]}"
                )
        if not np.all(np.isfinite(returns)):
            bad = np.argwhere(~np.isfinite(returns))[0]
            raise UnparseableNumber(
                f"non-finite return at row {bad[0] + 1}, "
                f"column {self.asset_names[bad[1]]}"
            )
        if np.any(np.abs(returns) >= RETURN_BOUND):
            bad = np.argwhere(np.abs(returns) >= RETURN_BOUND)[0]
            raise ReturnOutOfRange(
                f"|return| >= {RETURN_BOUND} at row {bad[0] + 1}, column "
                f"{self.asset_names[bad[1]]}; returns must be decimal fractions"
            )

    @property
    def n_periods(self) -> int:
        return self.returns.shape[0]

    @property
    def n_assets(self) -> int:
        return self.returns.shape[1]


@dataclass(frozen=True)
class AssetMoments:
    """Expected returns and covariance per period, plus period count metadata.

    ``sigma`` must be symmetric to 1e-12 and positive semi-definite up to
    -1e-10 x trace; both are checked on construction.
    """

    mu: np.ndarray
    sigma: np.ndarray
    periods_per_year: int = 1
    asset_names: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        n = mu.shape[0]
        if sigma.shape != (n, n):
            raise ValueError(f"sigma has shape {sigma.shape}, expected ({n}, {n})")
        if self.periods_per_year < 1:
            raise ValueError("periods_per_year must be a positive integer")
        if np.max(np.abs(sigma - sigma.T), initial=0.0) > 1e-12:
            raise ValueError("covariance must be symmetric within 1e-12")
        if np.any(np.diag(sigma) < 0):
            raise ValueError("covariance diagonal must be non-negative")
        trace = float(np.trace(sigma))
        if n > 0:
            smallest = float(np.linalg.eigvalsh(sigma)[0])
            if smallest < -1e-10 * max(trace, 1.0):
                raise ValueError(
                    f"covariance not positive semi-definite "
                    f"(smallest eigenvalue {smallest:g})"
                )
        if self.asset_names is not None and len(self.asset_names) != n:
            raise ValueError("asset_names length disagrees with mu")

    @property
    def n_assets(self) -> int:
        return self.mu.shape[0]

    def names(self) -> tuple[str, ...]:
        if self.asset_names is not None:
            return tuple(self.asset_names)
        return tuple(f"asset{i + 1}" for i in range(self.n_assets))


def load_returns_csv(path) -> ReturnSeries:
    """Parse and validate a returns CSV.

    Raises MissingCell, NonMonotoneDates, DuplicateAssetName,
    UnparseableNumber, UnparseableDate or MalformedCsv with the offending
    row (1-based, excluding the header) and column named in the message.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise MalformedCsv(f"{path} is not UTF-8: {exc}") from exc
    if not rows:
        raise MalformedCsv(f"{path} is empty")

    header = [cell.strip() for cell in rows[0]]
    if not header or header[0].lower() != "date":
        raise MalformedCsv(
            f"header must start with 'date', got {header[:1] or ['<empty>']}"
        )
    names = tuple(header[1:])
    if not names:
        raise MalformedCsv("header names no asset columns")
    if any(not n for n in names):
        raise MalformedCsv("header contains an empty asset name")
    if len(set(names)) != len(names):
        raise DuplicateAssetName(f"duplicate asset name in header {names}")

    dates: list[datetime.date] = []
    values: list[list[float]] = []
    row_no = 0
    for raw in rows[1:]:
        if not raw or all(not cell.strip() for cell in raw):
            continue  # blank line
        row_no += 1
        if len(raw) < len(names) + 1:
            missing_col = header[len(raw)] if len(raw) < len(header) else "?"
            raise MissingCell(f"row {row_no} is missing column {missing_col}")
        if len(raw) > len(names) + 1:
            raise MalformedCsv(
                f"row {row_no} has {len(raw)} cells, expected {len(names) + 1}"
            )
        cells = [cell.strip() for cell in raw]
        if not cells[0]:
            raise MissingCell(f"row {row_no} is missing column date")
        try:
            day = datetime.date.fromisoformat(cells[0])
        except ValueError as exc:
            raise UnparseableDate(
                f"row {row_no}: {cells[0]!r} is not an ISO-8601 date"
            ) from exc
        row_vals = []
        for j, cell in enumerate(cells[1:]):
            if not cell:
                raise MissingCell(f"row {row_no} is missing column {names[j]}")
            try:
                val = float(cell)
            except ValueError as exc:
                raise UnparseableNumber(
                    f"row {row_no}, column {names[j]}: {cell!r}"
                ) from exc
            if not np.isfinite(val):
                raise UnparseableNumber(
                    f"row {row_no}, column {names[j]}: {cell!r} is not finite"
                )
            row_vals.append(val)
        dates.append(day)
        values.append(row_vals)

    if len(values) < 2:
        raise TooFewObservations(f"{path} has {len(values)} data rows, need >= 2")
    return ReturnSeries(names, tuple(dates), np.array(values, dtype=float))


def estimate_moments(series: ReturnSeries, periods_per_year: int = 1) -> AssetMoments:
    """Column means and unbiased sample covariance of a return series."""
    if series.n_periods < 2:
        raise TooFewObservations("moment estimation needs at least 2 rows")
    mu = series.returns.mean(axis=0)
    sigma = np.atleast_2d(np.cov(series.returns, rowvar=False, ddof=1))
    sigma = (sigma + sigma.T) / 2.0
    # a constant column has identically zero deviations; keep that exact
    # instead of letting mean-rounding leak in a ~1e-35 variance
    constant = np.ptp(series.returns, axis=0) == 0.0
    if np.any(constant):
        mu[constant] = series.returns[0, constant]
        sigma[constant, :] = 0.0
        sigma[:, constant] = 0.0
    return AssetMoments(mu, sigma, periods_per_year, series.asset_names)


def annualize(moments: AssetMoments) -> AssetMoments:
    """Scale mean and covariance by periods_per_year (arithmetic convention).

    The result carries periods_per_year = 1, so applying it twice is the
    same as applying it once.
    """
    p = moments.periods_per_year
    return AssetMoments(moments.mu * p, moments.sigma * p, 1, moments.asset_names)


def correlation_matrix(moments: AssetMoments) -> np.ndarray:
    """Correlations from a covariance; unit diagonal, entries in [-1, 1]."""
    var = np.diag(moments.sigma)
    if np.any(var <= 0):
        bad = int(np.argmax(var <= 0))
        raise DegenerateAsset(
            f"asset {moments.names()[bad]} has zero variance; "
            "correlation undefined"
        )
    d = np.sqrt(var)
    corr = moments.sigma / np.outer(d, d)
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr
