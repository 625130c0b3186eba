"""Command-line surface: frontier, bifurcate, screen and lyapunov runs.

Every run resolves its configuration (CLI flags over config-file values
over defaults), computes everything, verifies the outputs against their
constraints, and only then writes files, so a failing run leaves nothing
behind. A run_manifest.json echoing the fully-resolved configuration
accompanies every output set; identical configurations reproduce
byte-identical files.

Exit codes: 0 success, 1 input error, 2 computational failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ComputationError, InputError, NumericalFailure
from .frontier import (
    ConstraintSet,
    corner_portfolios,
    efficient_frontier,
    frontier_with_turnover,
    tangency_portfolio,
)
from .logistic import bifurcation_diagram, detect_bifurcations, feigenbaum_ratio
from .market_data import annualize, estimate_moments, load_returns_csv
from .render import render_bifurcation_svg
from .stability import (
    ScreenConfig,
    ScreenPolicy,
    SigmaMapConfig,
    dynamics_from_moments,
    filter_frontier,
    lyapunov_exponent,
    report_to_dict,
    screen_portfolio,
)


def _fmt(x: float) -> str:
    """All floating-point output carries 12 significant digits."""
    return format(float(x), ".12g")


def _round12(obj):
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _json_text(payload) -> str:
    return json.dumps(_round12(payload), indent=2, sort_keys=True) + "\n"


class _UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    # spec reserves exit 2 for computational failures; usage mistakes are
    # input errors
    def error(self, message):
        raise _UsageError(message)


FRONTIER_DEFAULTS = {
    "input": None,
    "outdir": None,
    "seed": 0,
    "periods_per_year": 1,
    "mode": "long-only",
    "lower": None,
    "upper": None,
    "n_points": 50,
    "rf": None,
    "turnover_cap": None,
    "ref_weights": "equal",
    "gross_cap": 1.0,
    "max_short": 0.3,
}

BIFURCATE_DEFAULTS = {
    "outdir": None,
    "seed": 0,
    "r_min": 2.5,
    "r_max": 4.0,
    "n_r": 1500,
    "x0": 0.5,
    "n_transient": 1000,
    "n_keep": 400,
    "svg": False,
    "feigenbaum": False,
    "cascade_min": 2.95,
    "cascade_max": 3.5668,
    "coarse_step": 0.002,
    "refine_tol": 1e-5,
}

SCREEN_DEFAULTS = {
    "input": None,
    "outdir": None,
    "seed": 0,
    "periods_per_year": 1,
    "policy": "all",
    "k": 5,
    "sigma_cap": 0.6,
    "r_min": 2.8,
    "r_max": 4.0,
    "epsilon": 1e-6,
    "delta": 1e-2,
    "n_divergence": 1000,
    "n_lyapunov": 100_000,
    "x0": 0.4,
    "filter_frontier": False,
    "weight_floor": 0.01,
    "n_points": 50,
}

LYAPUNOV_DEFAULTS = {
    "outdir": None,
    "seed": 0,
    "r": None,
    "x0": 0.4,
    "n": 100_000,
    "n_transient": 1000,
}


def build_parser() -> _Parser:
    parser = _Parser(prog="frontier-dynamics",
                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input):
        if needs_input:
            p.add_argument("--input", help="returns CSV: date,<asset...>")
        p.add_argument("--outdir", help="output directory (created if missing)")
        p.add_argument("--config", help="JSON config file; CLI flags win")
        p.add_argument("--seed", type=int, help="seed for sampled policies")

    f = sub.add_parser("frontier", help="efficient frontier scenarios")
    common(f, needs_input=True)
    f.add_argument("--periods-per-year", type=int, dest="periods_per_year")
    f.add_argument("--mode", choices=["long-only", "130-30", "dollar-neutral", "turnover"])
    f.add_argument("--lower", type=float, help="common lower bound per asset")
    f.add_argument("--upper", type=float, help="common upper bound per asset")
    f.add_argument("--n-points", type=int, dest="n_points")
    f.add_argument("--rf", type=float, help="risk-free rate (adds tangency.json)")
    f.add_argument("--turnover-cap", type=float, dest="turnover_cap")
    f.add_argument("--ref-weights", dest="ref_weights",
                   help="'equal' or comma-separated weights")
    f.add_argument("--gross-cap", type=float, dest="gross_cap")
    f.add_argument("--max-short", type=float, dest="max_short")

    b = sub.add_parser("bifurcate", help="bifurcation diagram and cascade")
    common(b, needs_input=False)
    b.add_argument("--r-min", type=float, dest="r_min")
    b.add_argument("--r-max", type=float, dest="r_max")
    b.add_argument("--n-r", type=int, dest="n_r")
    b.add_argument("--x0", type=float)
    b.add_argument("--n-transient", type=int, dest="n_transient")
    b.add_argument("--n-keep", type=int, dest="n_keep")
    b.add_argument("--svg", action="store_const", const=True)
    b.add_argument("--feigenbaum", action="store_const", const=True)
    b.add_argument("--cascade-min", type=float, dest="cascade_min")
    b.add_argument("--cascade-max", type=float, dest="cascade_max")
    b.add_argument("--coarse-step", type=float, dest="coarse_step")
    b.add_argument("--refine-tol", type=float, dest="refine_tol")

    s = sub.add_parser("screen", help="pairwise stability screen")
    common(s, needs_input=True)
    s.add_argument("--periods-per-year", type=int, dest="periods_per_year")
    s.add_argument("--policy", choices=["all", "sampled"])
    s.add_argument("--k", type=int)
    s.add_argument("--sigma-cap", type=float, dest="sigma_cap")
    s.add_argument("--r-min", type=float, dest="r_min")
    s.add_argument("--r-max", type=float, dest="r_max")
    s.add_argument("--epsilon", type=float)
    s.add_argument("--delta", type=float)
    s.add_argument("--n-divergence", type=int, dest="n_divergence")
    s.add_argument("--n-lyapunov", type=int, dest="n_lyapunov")
    s.add_argument("--x0", type=float)
    s.add_argument("--filter-frontier", action="store_const", const=True,
                   dest="filter_frontier")
    s.add_argument("--weight-floor", type=float, dest="weight_floor")
    s.add_argument("--n-points", type=int, dest="n_points")

    ly = sub.add_parser("lyapunov", help="exponents at given parameters")
    common(ly, needs_input=False)
    ly.add_argument("--r", help="comma-separated map parameters")
    ly.add_argument("--x0", type=float)
    ly.add_argument("--n", type=int)
    ly.add_argument("--n-transient", type=int, dest="n_transient")

    return parser


def _resolve(defaults: dict, args: argparse.Namespace) -> dict:
    resolved = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputError("config file must hold a JSON object")
        unknown = set(loaded) - set(defaults)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        resolved.update(loaded)
    for key in defaults:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            resolved[key] = cli_val
    return resolved


class _OutputSet:
    """Collects file contents and writes them only when the run succeeded."""

    def __init__(self, outdir: Path):
        self.outdir = outdir
        self.files: dict[str, str] = {}

    def add(self, name: str, content: str):
        self.files[name] = content

    def write(self):
        self.outdir.mkdir(parents=True, exist_ok=True)
        written = []
        try:
            for name, content in self.files.items():
                path = self.outdir / name
                path.write_text(content, encoding="utf-8")
                written.append(path)
        except BaseException:
            for path in written:
                path.unlink(missing_ok=True)
            raise


def _require(resolved: dict, key: str) -> str:
    if not resolved.get(key):
        raise InputError(f"--{key.replace('_', '-')} is required")
    return resolved[key]


def _manifest(command: str, resolved: dict) -> str:
    return _json_text({
        "tool": "frontier-dynamics",
        "version": __version__,
        "subcommand": command,
        "config": resolved,
    })


def _weights_header(n: int) -> str:
    return ",".join(f"w_{i + 1}" for i in range(n))


def _frontier_csv(points) -> str:
    n = len(points[0].weights.weights)
    lines = [f"mu,sigma,{_weights_header(n)}"]
    for p in points:
        cells = [_fmt(p.mu_p), _fmt(p.sigma_p)] + [_fmt(w) for w in p.weights.weights]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_frontier(resolved: dict) -> _OutputSet:
    series = load_returns_csv(_require(resolved, "input"))
    moments = estimate_moments(series, resolved["periods_per_year"])
    if moments.periods_per_year > 1:
        moments = annualize(moments)
    mode = resolved["mode"]
    lower = resolved["lower"]
    upper = resolved["upper"]

    if mode == "long-only":
        cset = ConstraintSet(lower=0.0 if lower is None else lower, upper=upper)
    elif mode == "130-30":
        cset = ConstraintSet(lower=lower, upper=upper, budget=1.0,
                             max_short_total=resolved["max_short"])
    elif mode == "dollar-neutral":
        cset = ConstraintSet(lower=lower, upper=upper, budget=0.0,
                             gross_cap=resolved["gross_cap"])
    elif mode == "turnover":
        if resolved["turnover_cap"] is None:
            raise InputError("turnover mode needs --turnover-cap")
        ref = resolved["ref_weights"]
        if ref == "equal":
            w0 = np.full(moments.n_assets, 1.0 / moments.n_assets)
        else:
            try:
                w0 = np.array([float(v) for v in str(ref).split(",")])
            except ValueError as exc:
                raise InputError(f"cannot parse --ref-weights {ref!r}") from exc
        cset = ConstraintSet(lower=0.0 if lower is None else lower, upper=upper,
                             turnover_cap=resolved["turnover_cap"],
                             reference_weights=w0)
    else:
        raise InputError(f"unknown mode {mode!r}")

    if mode == "turnover":
        points = frontier_with_turnover(moments, cset, resolved["n_points"])
    else:
        points = efficient_frontier(moments, cset, resolved["n_points"])

    _verify_frontier(points, cset, mode)

    out = _OutputSet(Path(_require(resolved, "outdir")))
    out.add("frontier.csv", _frontier_csv(points))

    if mode == "long-only":
        corners = corner_portfolios(moments, cset)
        n = moments.n_assets
        lines = [f"mu,sigma,{_weights_header(n)},active_set"]
        for c in corners:
            cells = [_fmt(c.mu_p), _fmt(c.sigma_p)]
            cells += [_fmt(w) for w in c.weights.weights]
            cells.append(";".join(c.active_set))
            lines.append(",".join(cells))
        out.add("corners.csv", "\n".join(lines) + "\n")

    if resolved["rf"] is not None:
        tr = tangency_portfolio(moments, cset, resolved["rf"])
        out.add("tangency.json", _json_text({
            "weights": [float(w) for w in tr.weights.weights],
            "mu": tr.mu_p,
            "sigma": tr.sigma_p,
            "sharpe": tr.sharpe,
            "rf": tr.r_f,
        }))
    return out


def _verify_frontier(points, cset: ConstraintSet, mode: str):
    """Audit every row against its scenario constraints before writing."""
    for p in points:
        w = p.weights.weights
        if abs(float(np.sum(w)) - cset.budget) > 1e-8:
            raise NumericalFailure("frontier row violates the budget")
        if mode == "130-30":
            if float(np.sum(np.maximum(-w, 0.0))) > cset.max_short_total + 1e-10:
                raise NumericalFailure("frontier row violates the short cap")
        if mode == "dollar-neutral":
            if abs(float(np.sum(w))) > 1e-10:
                raise NumericalFailure("frontier row is not dollar-neutral")
            if float(np.sum(np.abs(w))) > cset.gross_cap + 1e-10:
                raise NumericalFailure("frontier row violates the gross cap")
        if mode == "turnover":
            dist = 0.5 * float(np.sum(np.abs(w - cset.reference_weights)))
            if dist > cset.turnover_cap + 1e-10:
                raise NumericalFailure("frontier row violates the turnover cap")


def cmd_bifurcate(resolved: dict) -> _OutputSet:
    diagram = bifurcation_diagram(
        resolved["r_min"], resolved["r_max"], resolved["n_r"],
        resolved["x0"], resolved["n_transient"], resolved["n_keep"],
    )
    out = _OutputSet(Path(_require(resolved, "outdir")))
    lines = ["r,x"]
    for i in range(diagram.r_grid.shape[0]):
        r_txt = _fmt(diagram.r_grid[i])
        for x in diagram.attractor_points[i]:
            lines.append(f"{r_txt},{_fmt(x)}")
    out.add("diagram.csv", "\n".join(lines) + "\n")

    if resolved["svg"]:
        out.add("diagram.svg", render_bifurcation_svg(diagram))

    if resolved["feigenbaum"]:
        seq = detect_bifurcations(
            resolved["cascade_min"], resolved["cascade_max"],
            resolved["coarse_step"], resolved["refine_tol"], resolved["x0"],
        )
        ratios = feigenbaum_ratio(seq).ratios if len(seq.b) >= 3 else ()
        lines = ["n,b_n,ratio"]
        for i, b in enumerate(seq.b):
            # ratio_n = (b_n - b_{n-1}) / (b_{n+1} - b_n), defined mid-sequence
            ratio = _fmt(ratios[i - 1]) if 1 <= i <= len(ratios) else ""
            lines.append(f"{i + 1},{_fmt(b)},{ratio}")
        out.add("bifurcations.csv", "\n".join(lines) + "\n")
    return out


def cmd_screen(resolved: dict) -> _OutputSet:
    series = load_returns_csv(_require(resolved, "input"))
    moments = estimate_moments(series, resolved["periods_per_year"])
    cfg = ScreenConfig(
        sigma_map=SigmaMapConfig(resolved["r_min"], resolved["r_max"],
                                 resolved["sigma_cap"]),
        epsilon=resolved["epsilon"],
        delta=resolved["delta"],
        n_divergence=resolved["n_divergence"],
        n_lyapunov=resolved["n_lyapunov"],
        x0=resolved["x0"],
    )
    if resolved["policy"] == "sampled":
        policy = ScreenPolicy("SAMPLED", k=resolved["k"], seed=resolved["seed"])
    else:
        policy = ScreenPolicy()

    dynamics = dynamics_from_moments(moments, cfg)
    report = screen_portfolio(dynamics, policy, cfg,
                              label=Path(resolved["input"]).stem)
    out = _OutputSet(Path(_require(resolved, "outdir")))
    out.add("stability.json", _json_text(report_to_dict(report)))

    if resolved["filter_frontier"]:
        work = annualize(moments) if moments.periods_per_year > 1 else moments
        points = efficient_frontier(work, ConstraintSet.long_only(),
                                    resolved["n_points"])
        annotated = filter_frontier(points, moments, cfg, policy,
                                    resolved["weight_floor"])
        n = moments.n_assets
        lines = [f"mu,sigma,{_weights_header(n)},stable,vacuous"]
        for a in annotated:
            cells = [_fmt(a.point.mu_p), _fmt(a.point.sigma_p)]
            cells += [_fmt(w) for w in a.point.weights.weights]
            cells += [str(a.stable).lower(), str(a.vacuous).lower()]
            lines.append(",".join(cells))
        out.add("frontier_annotated.csv", "\n".join(lines) + "\n")
    return out


def cmd_lyapunov(resolved: dict) -> _OutputSet:
    raw = _require(resolved, "r")
    try:
        params = [float(v) for v in str(raw).split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse --r {raw!r}") from exc
    if not params:
        raise InputError("--r names no parameters")
    lines = ["r,exponent"]
    for r in params:
        exponent = lyapunov_exponent(r, resolved["x0"], resolved["n"],
                                     resolved["n_transient"])
        lines.append(f"{_fmt(r)},{_fmt(exponent)}")
    out = _OutputSet(Path(_require(resolved, "outdir")))
    out.add("lyapunov.csv", "\n".join(lines) + "\n")
    return out


_COMMANDS = {
    "frontier": (FRONTIER_DEFAULTS, cmd_frontier),
    "bifurcate": (BIFURCATE_DEFAULTS, cmd_bifurcate),
    "screen": (SCREEN_DEFAULTS, cmd_screen),
    "lyapunov": (LYAPUNOV_DEFAULTS, cmd_lyapunov),
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        defaults, runner = _COMMANDS[args.command]
        resolved = _resolve(defaults, args)
        out = runner(resolved)
        out.add("run_manifest.json", _manifest(args.command, resolved))
        out.write()
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
