"""Command-line entry points reproducing the simulation and optimization tables.

Every command prints one JSON object (or a JSON array for tables) or a CSV
file with a header row.  Each record carries its full parameter set, so a
JSON record can be fed back through ``--config`` to rerun it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import secrets
import sys
import time
from typing import Any, Callable

import mpmath

from .bounds import failure_upper_bound, fit_decay_slope, per_round_rates, relaxed_upper_bound
from .continuum import (
    ContinuousParams,
    PrecisionConfig,
    decay_table,
    estimate_p2_continuous,
    optimize_eta_universal,
    optimize_eta_win,
    p_win_continuous,
    _eta_grid,
)
from .election import validate_agenda
from .estimator import (
    Z95,
    estimate_p1_discrete,
    estimate_p2_discrete,
    wilson_centroid_optimize,
)
from .streams import RngSpec, default_workers

# fields rendered in scientific notation in CSV output
SCI_FIELDS = {"q", "two_term_bound", "relaxed_bound"}


class UsageError(Exception):
    """Invalid parameters; exits with status 2."""


def _float_text(key: str, v: float) -> str:
    if key in SCI_FIELDS:
        return f"{v:.16e}"
    return f"{v:.17g}"


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    fields = list(rows[0])
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = {}
        for k, v in row.items():
            if isinstance(v, bool) or v is None:
                out[k] = "" if v is None else str(v).lower()
            elif isinstance(v, float):
                out[k] = _float_text(k, v)
            elif isinstance(v, list):
                out[k] = ";".join(map(str, v))
            else:
                out[k] = v
        writer.writerow(out)
    return buf.getvalue()


def render(result: dict | list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result, indent=2) + "\n"
    rows = result if isinstance(result, list) else [result]
    return _csv_text(rows)


def _num(x) -> float:
    return float(x) if isinstance(x, mpmath.mpf) else x


def _log10(q) -> float:
    return float(mpmath.log10(q)) if q > 0 else -math.inf


def _precision(digits) -> PrecisionConfig:
    return PrecisionConfig() if digits is None else PrecisionConfig.extended(digits)


def _seed(params: dict) -> int:
    if params.get("seed") is None:
        params["seed"] = secrets.randbits(63)
    return params["seed"]


def _warnings(m: int) -> list[str]:
    if m % 2 == 0:
        return ["even m: ties in the final are possible and deflate the estimate"]
    return []


def cmd_discrete_sim(p: dict) -> dict:
    validate_agenda(p["n"], p["l"])
    rng = RngSpec(_seed(p))
    est_fn = estimate_p2_discrete if p["universal"] else estimate_p1_discrete
    est = est_fn(p["n"], p["m"], p["l"], p["trials"], rng, p["z"])
    return {
        "command": "discrete-sim",
        "n": p["n"], "m": p["m"], "l": p["l"], "universal": p["universal"],
        "trials": p["trials"], "seed": p["seed"], "z": p["z"],
        "successes": est.successes, "p_hat": est.p_hat,
        "wilson_lower": est.wilson_lower, "wilson_upper": est.wilson_upper,
        "warnings": _warnings(p["m"]),
    }


def cmd_discrete_optimize(p: dict) -> dict:
    n = p["n"]
    l_min = 2 if p["l_min"] is None else p["l_min"]
    l_max = n // 2 - 1 if p["l_max"] is None else p["l_max"]
    validate_agenda(n, l_min)
    validate_agenda(n, l_max)
    res = wilson_centroid_optimize(
        n, p["m"], l_min, l_max, p["scan_trials"], p["validation_trials"], p["z"],
        RngSpec(_seed(p)), p["universal"])
    v = res.p_validated
    if p.get("scan_out"):
        rows = [{"l": l, **e.as_dict()} for l, e in res.scan.items()]
        _write(render(rows, "csv"), p["scan_out"])
    return {
        "command": "discrete-optimize",
        "n": n, "m": p["m"], "l_min": l_min, "l_max": l_max,
        "universal": p["universal"], "scan_trials": p["scan_trials"],
        "validation_trials": p["validation_trials"], "seed": p["seed"], "z": p["z"],
        "l_opt": res.l_opt, "l_left": res.l_left, "l_right": res.l_right,
        "ratio": res.l_opt / n,
        "successes": v.successes, "p_hat": v.p_hat,
        "wilson_lower": v.wilson_lower, "wilson_upper": v.wilson_upper,
        "warnings": _warnings(p["m"]),
    }


def cmd_continuous_eval(p: dict) -> dict:
    prm = ContinuousParams(p["m"], p["eta"])
    win, fail = p_win_continuous(prm, _precision(p["precision"]))
    return {
        "command": "continuous-eval", "m": p["m"], "eta": p["eta"],
        "precision": p["precision"],
        "p": _num(win), "q": _num(fail), "log10_q": _log10(fail),
    }


def cmd_continuous_optimize(p: dict) -> dict:
    opt = optimize_eta_win(p["m"], p["grid_start"], p["grid_end"], p["step"],
                           _precision(p["precision"]))
    return {
        "command": "continuous-optimize", "m": p["m"],
        "grid_start": p["grid_start"], "grid_end": p["grid_end"], "step": p["step"],
        "precision": p["precision"],
        "eta_star": opt.eta, "p": _num(opt.p), "q": _num(opt.q), "log10_q": _log10(opt.q),
    }


def cmd_decay_table(p: dict) -> list[dict]:
    rows = decay_table(p["m"], _precision(p["precision"]),
                       grid_start=p["grid_start"], grid_end=p["grid_end"], step=p["step"])
    slope = fit_decay_slope(rows) if len(rows) >= 3 else None
    return [{"command": "decay-table", "m": r.m, "precision": p["precision"],
             "eta_star": r.eta_star, "log10_q": r.log10_q, "fitted_slope": slope}
            for r in rows]


def cmd_continuous_universal(p: dict) -> dict:
    seed = _seed(p)
    rec = {"command": "continuous-universal", "m": p["m"], "trials": p["trials"],
           "seed": seed, "z": p["z"]}
    if p["eta"] is not None:
        est = estimate_p2_continuous(p["m"], p["eta"], p["trials"], seed, p["z"])
        rec["eta"] = p["eta"]
    else:
        grid = _eta_grid(p["grid_start"], p["grid_end"], p["step"])
        opt = optimize_eta_universal(p["m"], p["trials"], grid, seed,
                                     p["validation_trials"], p["z"])
        est = opt.estimate
        rec.update(grid_start=p["grid_start"], grid_end=p["grid_end"], step=p["step"],
                   validation_trials=est.trials, eta_star=opt.eta)
    rec.update(successes=est.successes, p_hat=est.p_hat,
               wilson_lower=est.wilson_lower, wilson_upper=est.wilson_upper)
    return rec


def cmd_bounds(p: dict) -> dict:
    validate_agenda(p["n"], p["l"])
    if p["m"] < 0:
        raise ValueError("m must be >= 0")
    rates = per_round_rates(p["n"], p["l"])
    return {
        "command": "bounds", "n": p["n"], "m": p["m"], "l": p["l"],
        "two_term_bound": failure_upper_bound(p["n"], p["m"], p["l"]),
        "relaxed_bound": relaxed_upper_bound(p["n"], p["m"], p["l"]),
        "rate_first_round": rates["first_round"], "rate_final": rates["final"],
    }


def _m_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# (flag, dest, type, default, required); default None with required=False means optional
_COMMON_OUT = [("--format", "format", str, "json", False), ("--out", "out", str, None, False)]
_COMMANDS: dict[str, tuple[Callable, list, str]] = {
    "discrete-sim": (cmd_discrete_sim, [
        ("--n", "n", int, None, True), ("--m", "m", int, None, True),
        ("--l", "l", int, None, True), ("--trials", "trials", int, 100_000, False),
        ("--seed", "seed", int, None, False), ("--z", "z", float, Z95, False),
    ], "Monte Carlo estimate of the individual or universal victory probability"),
    "discrete-optimize": (cmd_discrete_optimize, [
        ("--n", "n", int, None, True), ("--m", "m", int, None, True),
        ("--l-min", "l_min", int, None, False), ("--l-max", "l_max", int, None, False),
        ("--scan-trials", "scan_trials", int, 10_000, False),
        ("--validation-trials", "validation_trials", int, 100_000, False),
        ("--seed", "seed", int, None, False), ("--z", "z", float, Z95, False),
        ("--scan-out", "scan_out", str, None, False),
    ], "Wilson Centroid search for the optimal cluster width"),
    "continuous-eval": (cmd_continuous_eval, [
        ("--m", "m", int, None, True), ("--eta", "eta", float, None, True),
        ("--precision", "precision", int, None, False),
    ], "evaluate the continuous-limit victory probability"),
    "continuous-optimize": (cmd_continuous_optimize, [
        ("--m", "m", int, None, True),
        ("--grid-start", "grid_start", float, 0.1, False),
        ("--grid-end", "grid_end", float, 0.45, False),
        ("--step", "step", float, 0.0007, False),
        ("--precision", "precision", int, None, False),
    ], "optimal continuous width and its failure probability"),
    "decay-table": (cmd_decay_table, [
        ("--m", "m", _m_list, None, True),
        ("--grid-start", "grid_start", float, 0.1, False),
        ("--grid-end", "grid_end", float, 0.45, False),
        ("--step", "step", float, 0.0007, False),
        ("--precision", "precision", int, None, False),
    ], "optimal width and log10 failure probability for several m"),
    "continuous-universal": (cmd_continuous_universal, [
        ("--m", "m", int, None, True), ("--trials", "trials", int, 100_000, False),
        ("--seed", "seed", int, None, False), ("--eta", "eta", float, None, False),
        ("--grid-start", "grid_start", float, 0.1, False),
        ("--grid-end", "grid_end", float, 0.45, False),
        ("--step", "step", float, 0.0007, False),
        ("--validation-trials", "validation_trials", int, None, False),
        ("--z", "z", float, Z95, False),
    ], "continuous universal event: estimate at --eta, or optimize over a grid"),
    "bounds": (cmd_bounds, [
        ("--n", "n", int, None, True), ("--m", "m", int, None, True),
        ("--l", "l", int, None, True),
    ], "Chernoff upper bounds on the failure probability"),
}
_FLAGS = {"discrete-sim": ["universal"], "discrete-optimize": ["universal"]}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="runoff-agenda",
        description="Agenda control in two-round elections with cyclic preferences.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, opts, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        for flag, dest, typ, _, _ in opts + _COMMON_OUT:
            kw: dict[str, Any] = {"dest": dest, "type": typ, "default": None}
            if dest == "format":
                kw["choices"] = ["json", "csv"]
            sp.add_argument(flag, **kw)
        for dest in _FLAGS.get(name, []):
            sp.add_argument(f"--{dest}", dest=dest, action="store_true", default=None)
        sp.add_argument("--config", dest="config", default=None,
                        help="JSON record whose fields supply default parameters")
    return parser


def _resolve(name: str, ns: argparse.Namespace) -> dict:
    """Merge command line, ``--config`` record and built-in defaults."""
    _, opts, _ = _COMMANDS[name]
    config: dict = {}
    if ns.config:
        with open(ns.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        config = loaded[0] if isinstance(loaded, list) else loaded
        if name == "decay-table" and isinstance(loaded, list):
            config = dict(config, m=[r["m"] for r in loaded])
    params: dict = {}
    for flag, dest, _, default, required in opts + _COMMON_OUT:
        val = getattr(ns, dest)
        if val is None:
            val = config.get(dest, default)
        if required and val is None:
            raise UsageError(f"{name}: {flag} is required")
        params[dest] = val
    for dest in _FLAGS.get(name, []):
        val = getattr(ns, dest)
        params[dest] = bool(config.get(dest, False) if val is None else val)
    return params


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run(argv: list[str] | None = None) -> tuple[int, dict | list | None]:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        default_workers()
        params = _resolve(ns.command, ns)
        fn = _COMMANDS[ns.command][0]
        t0 = time.perf_counter()
        result = fn(params)
        elapsed = round((time.perf_counter() - t0) * 1000, 3)
        if isinstance(result, dict) and "seed" in result:
            result["elapsed_ms"] = elapsed
    except (UsageError, ValueError) as exc:
        print(f"{parser.prog} {ns.command}: error: {exc}", file=sys.stderr)
        return 2, None
    except OSError as exc:
        print(f"{parser.prog} {ns.command}: I/O error: {exc}", file=sys.stderr)
        return 1, None
    try:
        _write(render(result, params["format"]), params["out"])
    except OSError as exc:
        print(f"{parser.prog} {ns.command}: I/O error: {exc}", file=sys.stderr)
        return 1, None
    return 0, result


def main(argv: list[str] | None = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
