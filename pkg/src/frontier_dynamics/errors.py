"""Exception hierarchy.

``InputError`` covers malformed or out-of-contract inputs and maps to CLI
exit code 1; ``ComputationError`` covers solver and dynamics failures and
maps to CLI exit code 2.
"""


class FrontierDynamicsError(Exception):
    """Base class for every error raised by this package."""


class InputError(FrontierDynamicsError):
    """The caller supplied data that violates a documented contract."""


class ComputationError(FrontierDynamicsError):
    """A well-formed problem could not be solved."""


# --- return-series ingestion -------------------------------------------------

class MissingCell(InputError):
    """A CSV cell is empty; the message names the row and column."""


class NonMonotoneDates(InputError):
    """Dates are not strictly increasing."""


class DuplicateAssetName(InputError):
    """Two columns share an asset name."""


class UnparseableNumber(InputError):
    """A return cell is not a decimal number."""


class UnparseableDate(InputError):
    """A date cell is not an ISO-8601 day."""


class MalformedCsv(InputError):
    """Structural damage: bad header, ragged row, or undecodable bytes."""


class ReturnOutOfRange(InputError):
    """|return| >= 10; almost certainly percent data passed as decimals."""


class TooFewObservations(InputError):
    """Moment estimation needs at least two rows."""


class DegenerateAsset(InputError):
    """An asset has zero variance where a correlation is required."""


# --- portfolio analytics ------------------------------------------------------

class DimensionMismatch(InputError):
    """Weight vector length disagrees with the moment dimension."""


class NotTwoAssets(InputError):
    """The closed-form two-asset sweep needs exactly two assets."""


class TooManyAssets(InputError):
    """The exhaustive grid oracle is limited to four assets."""


class TooFewAssets(InputError):
    """Pairwise screening needs at least two assets."""


class Infeasible(ComputationError):
    """The constraint set admits no portfolio (at the requested target)."""


class NumericalFailure(ComputationError):
    """Iteration cap reached, singular system, or unbounded objective."""


class NoExcessReturn(ComputationError):
    """Every feasible portfolio returns at most the risk-free rate."""


# --- dynamics ------------------------------------------------------------------

class ParamOutOfRange(InputError):
    """Map parameter or initial state outside its invariant region."""


class NoRealCycle(ComputationError):
    """No real period-2 orbit exists at this parameter (r <= 3)."""


class NoDoublingFound(ComputationError):
    """The scanned parameter range contains no period-doubling."""


class TooFewBifurcations(InputError):
    """Ratio estimation needs at least three doubling parameters."""


class DegenerateOrbit(ComputationError):
    """An iterate landed on a critical point; the exponent sum is undefined."""
