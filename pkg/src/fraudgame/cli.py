"""Command-line surface.

Subcommands: solve (regime and boundaries), curves (equilibrium curves on
a belief grid), simulate (Monte-Carlo payoff estimates), verify (analytic
verification suite), best-response (deviation sweeps for both players).

Options can come from a flat key=value config file (--config); explicit
command-line flags override file values, and unknown keys in the file are
rejected.  Numeric output uses 17 significant digits so runs are
comparable bit for bit; every randomized command records its seed in the
output rows.

Exit codes: 0 success, 1 verification or best-response failure, 2 usage
error, 3 regime error (wrong equilibrium family for the given M).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from .errors import DomainError, RegimeError
from .dynamics import PathConfig, simulate_path_with_trace
from .mixed import MixedEquilibrium, build_mixed
from .model import (
    ConstantRate,
    EquilibriumRate,
    ModelParams,
    ScaledEquilibrium,
    classify,
    format_fraud,
    m_hat,
    parse_fraud,
    parse_stopper,
)
from .montecarlo import (
    deviation_sweep_fraud,
    deviation_sweep_stopper,
    equilibrium_stopper,
    estimate_account_cost,
    estimate_fraud_payoff_exante,
    estimate_fraud_payoff_interim,
)
from .pure import build_pure
from .verify import inequality_scan, residual_suite, VerifyReport

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2
EXIT_REGIME = 3

_CONFIG_KEYS = {
    "r", "M", "p", "dt", "horizon", "clamp_eps", "seed", "n_paths",
    "fraud", "stopper", "format", "output", "grid_points", "p_min",
    "p_max", "grid_size", "levels", "fraud_deviations", "trace_output",
}


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_rows(columns, rows, fmt: str, output: Optional[str]) -> None:
    """Emit a table as CSV (17 significant digits) or JSON with the same values."""
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(row[c]) for c in columns) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps({"columns": list(columns), "rows": rows}, indent=2) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key = value, got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise DomainError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = val.strip()
    return values


class _Options:
    """Merged view of config-file values and command-line overrides."""

    def __init__(self, args: argparse.Namespace):
        self._cfg = _load_config(args.config) if args.config else {}
        self._args = args

    def get(self, key: str, cast, default=None, required: bool = False):
        flag = getattr(self._args, key, None)
        if flag is not None:
            return flag
        if key in self._cfg:
            try:
                if cast is bool:
                    return self._cfg[key].lower() in ("1", "true", "yes")
                return cast(self._cfg[key])
            except ValueError as exc:
                raise DomainError(f"bad config value for {key}: {exc}") from exc
        if required and default is None:
            raise DomainError(f"missing required option --{key.replace('_', '-')}")
        return default


def _model(opts: _Options, need_p: bool) -> ModelParams:
    r = opts.get("r", float, required=True)
    M = opts.get("M", float, required=True)
    p = opts.get("p", float, 0.5 if not need_p else None, required=need_p)
    return ModelParams(r=r, M=M, p=p)


def _equilibrium(params: ModelParams):
    if classify(params).is_pure:
        return build_pure(params.r, params.M)
    return build_mixed(params.r, params.M)


def _path_config(opts: _Options, params: ModelParams) -> PathConfig:
    return PathConfig(
        dt=opts.get("dt", float, 1e-3),
        horizon=opts.get("horizon", float, 12.0 / params.r),
        clamp_eps=opts.get("clamp_eps", float, 1e-9),
        seed=opts.get("seed", int, 0),
        record_path=bool(opts.get("trace_output", str, None)),
    )


# --- subcommands -------------------------------------------------------------


def _cmd_solve(opts: _Options) -> int:
    params = _model(opts, need_p=False)
    regime = classify(params)
    print(f"regime: {regime.kind}")
    print(f"m_hat = {regime.m_hat:.6f}")
    eq = _equilibrium(params)
    print(f"b = {eq.b:.6f}")
    if isinstance(eq, MixedEquilibrium):
        print(f"v_b = {eq.v_b:.6f}")
        print(f"a = {eq.a:.6f}")
    return EXIT_OK


def _cmd_curves(opts: _Options) -> int:
    params = _model(opts, need_p=False)
    eq = _equilibrium(params)
    n = opts.get("grid_points", int, 2000)
    p_min = opts.get("p_min", float, 0.001)
    p_max = opts.get("p_max", float, 0.999)
    if not (0.0 < p_min < p_max < 1.0):
        raise DomainError(f"need 0 < p_min < p_max < 1, got {p_min!r}, {p_max!r}")
    grid = np.linspace(p_min, p_max, n)
    v = np.asarray(eq.v(grid))
    u = np.asarray(eq.u(grid))
    lam = np.asarray(eq.lambda_star(grid))
    columns = ["p", "v", "u", "pv", "lambda_star"]
    rows = [
        {"p": float(pi), "v": float(vi), "u": float(ui), "pv": float(pi * vi),
         "lambda_star": float(li)}
        for pi, vi, ui, li in zip(grid, v, u, lam)
    ]
    if isinstance(eq, MixedEquilibrium):
        columns.append("beta")
        beta = np.asarray(eq.beta(grid))
        for row, bi in zip(rows, beta):
            row["beta"] = float(bi)
    _write_rows(columns, rows, opts.get("format", str, "csv"),
                opts.get("output", str, None))
    return EXIT_OK


_ESTIMATE_COLUMNS = ["label", "mean", "std_error", "n_paths", "dt", "horizon", "seed"]


def _estimate_row(label: str, est, seed: int) -> dict:
    return {
        "label": label,
        "mean": est.mean,
        "std_error": est.std_error,
        "n_paths": est.n_paths,
        "dt": est.dt_used,
        "horizon": est.horizon_used,
        "seed": seed,
    }


def _cmd_simulate(opts: _Options) -> int:
    params = _model(opts, need_p=True)
    eq = _equilibrium(params)
    config = _path_config(opts, params)
    n = opts.get("n_paths", int, 10_000)
    fraud = parse_fraud(opts.get("fraud", str, "equilibrium"))
    stopper_text = opts.get("stopper", str, None)
    stopper = parse_stopper(stopper_text) if stopper_text else equilibrium_stopper(eq)

    rows = [
        _estimate_row("account_cost",
                      estimate_account_cost(params, eq, stopper, fraud, n, config),
                      config.seed),
        _estimate_row("fraud_interim",
                      estimate_fraud_payoff_interim(params, eq, stopper, fraud, n, config),
                      config.seed),
        _estimate_row("fraud_exante",
                      estimate_fraud_payoff_exante(params, eq, stopper, fraud, n, config),
                      config.seed),
    ]
    _write_rows(_ESTIMATE_COLUMNS, rows, opts.get("format", str, "csv"),
                opts.get("output", str, None))

    trace_output = opts.get("trace_output", str, None)
    if trace_output:
        _, trace = simulate_path_with_trace(params, eq, fraud, stopper, 1, config)
        trace_rows = [
            {"time": float(t), "P": float(p), "Gamma": float(g_), "theft": float(f)}
            for t, p, g_, f in trace
        ]
        _write_rows(["time", "P", "Gamma", "theft"], trace_rows, "csv", trace_output)
    return EXIT_OK


def _cmd_verify(opts: _Options) -> int:
    params = _model(opts, need_p=False)
    eq = _equilibrium(params)
    grid_size = opts.get("grid_size", int, 1000)
    report = residual_suite(eq, grid_size=grid_size)
    extra = inequality_scan()
    combined = VerifyReport(regime=report.regime, r=report.r, M=report.M,
                            checks=report.checks + tuple(extra))
    print(combined.format_table())
    output = opts.get("output", str, None)
    if output:
        with open(output, "w") as fh:
            fh.write(combined.to_json() + "\n")
    return EXIT_OK if combined.all_passed else EXIT_FAILED_CHECK


def _parse_levels(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise DomainError(f"bad levels list {text!r}: {exc}") from exc


def _cmd_best_response(opts: _Options) -> int:
    params = _model(opts, need_p=True)
    eq = _equilibrium(params)
    config = _path_config(opts, params)
    n = opts.get("n_paths", int, 10_000)
    seed = config.seed

    levels_text = opts.get("levels", str, None)
    if levels_text:
        levels = _parse_levels(levels_text)
    else:
        levels = [x for x in (0.8 * eq.b, 0.9 * eq.b, 1.1 * eq.b, 0.5) if 0.0 < x < 1.0]

    fraud_text = opts.get("fraud_deviations", str, None)
    if fraud_text:
        fraud_devs = [parse_fraud(tok) for tok in fraud_text.split(",") if tok.strip()]
    else:
        lam_p = float(eq.lambda_star(params.p))
        fraud_devs = [ConstantRate(0.5 * lam_p), ConstantRate(2.0 * lam_p),
                      ScaledEquilibrium(0.5), ScaledEquilibrium(2.0)]

    eq_stopper = equilibrium_stopper(eq)
    eq_cost = estimate_account_cost(params, eq, eq_stopper, EquilibriumRate(), n, config)
    eq_payoff = estimate_fraud_payoff_interim(params, eq, eq_stopper, EquilibriumRate(),
                                              n, config)
    v_ref = float(eq.v(params.p))

    rows = [_estimate_row("stopper:equilibrium", eq_cost, seed)]
    beaten = []
    for level, est in deviation_sweep_stopper(params, eq, levels, n, config):
        rows.append(_estimate_row(f"stopper:threshold:{level:.17g}", est, seed))
        margin = 3.0 * (est.std_error ** 2 + eq_cost.std_error ** 2) ** 0.5
        if est.mean < eq_cost.mean - margin:
            beaten.append(f"threshold:{level:g} cost {est.mean:.6g} "
                          f"< equilibrium {eq_cost.mean:.6g} - 3se")

    rows.append(_estimate_row("fraud:equilibrium", eq_payoff, seed))
    for strategy, est in deviation_sweep_fraud(params, eq, fraud_devs, n, config):
        rows.append(_estimate_row(f"fraud:{format_fraud(strategy)}", est, seed))
        allowance = 3.0 * est.std_error + 0.02 * v_ref
        if est.mean > v_ref + allowance:
            beaten.append(f"fraud {format_fraud(strategy)} payoff {est.mean:.6g} "
                          f"> v(p) {v_ref:.6g} + allowance")

    _write_rows(_ESTIMATE_COLUMNS, rows, opts.get("format", str, "csv"),
                opts.get("output", str, None))
    for msg in beaten:
        print(f"DEVIATION BEATS EQUILIBRIUM: {msg}", file=sys.stderr)
    return EXIT_FAILED_CHECK if beaten else EXIT_OK


# --- argument parsing ---------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraudgame",
        description="Equilibria, simulation and verification for the "
                    "fraud-detection stopping game.",
    )
    parser.add_argument("--config", help="flat key = value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, with_p: bool, with_sim: bool):
        sp.add_argument("--r", type=float, help="discount rate (> 0)")
        sp.add_argument("--M", type=float, help="deactivation cost (> 0)")
        if with_p:
            sp.add_argument("--p", type=float, help="prior probability of fraud")
        if with_sim:
            sp.add_argument("--dt", type=float, help="time step (default 1e-3)")
            sp.add_argument("--horizon", type=float, help="max time (default 12/r)")
            sp.add_argument("--clamp-eps", dest="clamp_eps", type=float,
                            help="belief clamp offset (default 1e-9)")
            sp.add_argument("--seed", type=int, help="base seed (default 0)")
            sp.add_argument("--n-paths", dest="n_paths", type=int,
                            help="number of paths (default 10000)")
        sp.add_argument("--format", choices=("csv", "json"), help="output format")
        sp.add_argument("--output", help="output file (default stdout)")

    sp = sub.add_parser("solve", help="print regime, boundaries and m_hat")
    add_common(sp, with_p=False, with_sim=False)

    sp = sub.add_parser("curves", help="emit p, v, u, pv, lambda_star[, beta]")
    add_common(sp, with_p=False, with_sim=False)
    sp.add_argument("--grid-points", dest="grid_points", type=int,
                    help="number of grid points (default 2000)")
    sp.add_argument("--p-min", dest="p_min", type=float, help="grid start (default 0.001)")
    sp.add_argument("--p-max", dest="p_max", type=float, help="grid end (default 0.999)")

    sp = sub.add_parser("simulate", help="Monte-Carlo payoff estimates")
    add_common(sp, with_p=True, with_sim=True)
    sp.add_argument("--fraud", help="fraud strategy (default equilibrium)")
    sp.add_argument("--stopper", help="stopper strategy (default: regime equilibrium)")
    sp.add_argument("--trace-output", dest="trace_output",
                    help="also dump the path-0 trace CSV here")

    sp = sub.add_parser("verify", help="analytic verification suite")
    add_common(sp, with_p=False, with_sim=False)
    sp.add_argument("--grid-size", dest="grid_size", type=int,
                    help="residual grid size (default 1000)")

    sp = sub.add_parser("best-response", help="deviation sweeps for both players")
    add_common(sp, with_p=True, with_sim=True)
    sp.add_argument("--levels", help="comma-separated threshold deviations")
    sp.add_argument("--fraud-deviations", dest="fraud_deviations",
                    help="comma-separated fraud strategies")

    return parser


_COMMANDS = {
    "solve": _cmd_solve,
    "curves": _cmd_curves,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "best-response": _cmd_best_response,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        opts = _Options(args)
        return _COMMANDS[args.command](opts)
    except RegimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
