"""Command-line interface: ``bose-mi <subcommand> [options]``.

Every subcommand writes one table (CSV with a header, or a JSON array) to
stdout or ``--output``.  Errors print a single ``error: <kind>: <message>``
line on stderr and exit with 2 (domain or usage), 3 (insufficient data) or
4 (numerical failure).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import SWEEP_COLUMNS, SweepSpec, fit_log_scaling, run_sweep
from .correlation import mutual_information
from .dispersion import HoppingKind, HoppingModel, dispersion_table
from .errors import BoseMIError, ConvergenceError, DomainError, InsufficientDataError, PositivityError
from .io import read_rows, render
from .thermo import solve_mu, tc_infinite_range, tc_long_range, thermal_entropy
from .zero_temperature import (
    entanglement_entropy_exact,
    entropy_gaussian_asymptotic,
    entropy_poisson_asymptotic,
    schmidt_spectrum,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
WORKERS_ENV = "BOSE_MI_WORKERS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_ladder(text: str, factor: float = 2.0, integer: bool = True) -> list:
    """``"a,b,c"`` is a list; ``"lo:hi"`` or ``"lo:hi:f"`` is a geometric ladder ``lo * f**j <= hi``."""
    conv = (lambda s: int(float(s))) if integer else float
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (2, 3):
                raise ValueError
            lo, hi = conv(parts[0]), conv(parts[1])
            f = float(parts[2]) if len(parts) == 3 else factor
            if not (lo > 0 and hi >= lo and f > 1):
                raise ValueError
            out, x = [], lo
            while x <= hi * (1 + 1e-12):
                out.append(conv(round(x) if integer else x))
                x *= f
            return out
        return [conv(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list or ladder {text!r}") from None


def _float_list(text: str) -> list:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def _add_model(p, need_L: bool = False):
    p.add_argument("--model", choices=[k.value for k in HoppingKind], default="infinite")
    p.add_argument("--gamma", type=float, help="power-law exponent (powerlaw only)")
    p.add_argument("--t", type=float, default=1.0, help="hopping energy")
    p.add_argument("--n", type=float, default=1.0, help="target density")
    if need_L:
        p.add_argument("--L", type=int, required=True, help="ring size")


def _add_temperature(p, many: bool = False):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--beta", help="inverse temperature" + (" list" if many else ""))
    g.add_argument("--T", help="temperature" + (" list" if many else ""))
    g.add_argument("--tc-frac", help="temperature as a multiple of T_C" + (" (list)" if many else ""))


def _common(p):
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", help="write here instead of stdout")
    p.add_argument("--config", help="file of 'key = value' lines merged under the flags")
    p.add_argument("--tol", type=float, default=1e-12, help="relative density tolerance for mu")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bose-mi", description="Entanglement and mutual information of free lattice bosons.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dispersion", help="single-particle energies on the k grid")
    _add_model(p, need_L=True)
    p.add_argument("--thermo-limit", action="store_true", help="use the infinite-chain power-law dispersion")
    _common(p)

    p = sub.add_parser("tc", help="BEC critical temperature")
    _add_model(p)
    _common(p)

    p = sub.add_parser("mu", help="chemical potential and occupations summary")
    _add_model(p, need_L=True)
    _add_temperature(p)
    p.add_argument("--thermo-limit", action="store_true")
    _common(p)

    p = sub.add_parser("zero-entropy", help="ground-state entanglement of an N-boson condensate")
    p.add_argument("--N", default="100:100000:10", help="particle numbers: list or lo:hi[:factor]")
    p.add_argument("--fraction", type=float, default=0.5, help="block fraction LA / L")
    _common(p)

    p = sub.add_parser("mutual-info", help="E_A, E_B, S and E_M for one ring")
    _add_model(p, need_L=True)
    _add_temperature(p)
    p.add_argument("--LA", type=int, help="block size (default L // 2)")
    p.add_argument("--thermo-limit", action="store_true")
    _common(p)

    p = sub.add_parser("sweep", help="mutual information over a (beta, L) grid")
    _add_model(p)
    _add_temperature(p, many=True)
    p.add_argument("--sizes", required=True, help="ring sizes: list or lo:hi (powers of 2)")
    p.add_argument("--partition", default="equal", help="'equal' or a block fraction in (0, 1)")
    p.add_argument("--thermo-limit", action="store_true")
    p.add_argument("--workers", type=int, help=f"thread count (else ${WORKERS_ENV}, else 1)")
    p.add_argument("--resume", action="store_true", help="keep rows already in --output")
    _common(p)

    p = sub.add_parser("fit", help="slope of E_M against ln LA for each beta")
    p.add_argument("input", help="CSV or JSON produced by 'sweep' ('-' for stdin)")
    p.add_argument("--window", help="LA_min:LA_max (default: largest half of the sizes, at least 4)")
    _common(p)
    return parser


def _subparsers(parser) -> dict:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices
    return {}


def _read_config(path: str) -> dict:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for i, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{i}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _apply_config(sub: argparse.ArgumentParser, cfg: dict):
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, val in cfg.items():
        a = actions.get(key)
        if a is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(a, argparse._StoreTrueAction):
            defaults[key] = val.lower() in ("1", "true", "yes", "on")
        else:
            # argparse converts string defaults with the action's type
            defaults[key] = val
        a.required = False
    sub.set_defaults(**defaults)


def _flag_given(argv, flag: str) -> bool:
    return any(a == flag or a.startswith(flag + "=") for a in argv)


def _config_path(argv):
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def _model(args, L: int) -> HoppingModel:
    return HoppingModel(args.model, L, args.t, args.gamma)


def _tc_for(args) -> float:
    if args.model == "infinite":
        return tc_infinite_range(args.t, args.n).Tc
    if args.model == "powerlaw":
        HoppingModel(args.model, 2, args.t, args.gamma)
        return tc_long_range(args.gamma, args.t, args.n).Tc
    raise DomainError("nearest-neighbour hopping has no finite-T BEC, so --tc-frac is undefined")


def _betas(args, many: bool) -> list:
    given = [x for x in (args.beta, args.T, args.tc_frac) if x is not None]
    if len(given) > 1:
        raise UsageError("give exactly one of --beta, --T, --tc-frac")
    if not given:
        raise UsageError("a temperature is required (--beta, --T or --tc-frac)")
    vals = _float_list(given[0])
    if not many and len(vals) != 1:
        raise UsageError("expected a single temperature value")
    if any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise DomainError(f"temperatures must be positive and finite, got {given[0]}")
    if args.beta is not None:
        return vals
    if args.T is not None:
        return [1.0 / v for v in vals]
    Tc = _tc_for(args)
    return [1.0 / (f * Tc) for f in vals]


def _gamma_cell(args):
    return args.gamma if args.gamma is not None else math.nan


def cmd_dispersion(args):
    model = _model(args, args.L)
    tab = dispersion_table(model, args.thermo_limit)
    rows = [{"m": m, "k": float(k), "eps": float(e)} for m, (k, e) in enumerate(zip(tab.k, tab.eps))]
    return rows, ("m", "k", "eps")


def cmd_tc(args):
    cols = ("model", "gamma", "t", "n", "Tc", "beta_c", "method", "note")
    base = {"model": args.model, "gamma": _gamma_cell(args), "t": args.t, "n": args.n}
    if args.model == "nn":
        HoppingModel(args.model, 2, args.t)
        row = dict(base, Tc=math.nan, beta_c=math.nan, method="none", note="no finite-T BEC")
        return [row], cols
    if args.model == "infinite":
        res = tc_infinite_range(args.t, args.n)
    else:
        HoppingModel(args.model, 2, args.t, args.gamma)
        if not args.gamma < 2:
            row = dict(base, Tc=math.nan, beta_c=math.nan, method="none", note="no finite-T BEC")
            return [row], cols
        res = tc_long_range(args.gamma, args.t, args.n)
    return [dict(base, Tc=res.Tc, beta_c=res.beta_c, method=res.method.value, note="")], cols


def cmd_mu(args):
    beta = _betas(args, many=False)[0]
    model = _model(args, args.L)
    st = solve_mu(model, beta, args.n, tol=args.tol, thermo_limit=args.thermo_limit)
    row = {
        "model": args.model, "gamma": _gamma_cell(args), "t": args.t, "n": args.n, "L": args.L,
        "beta": st.beta, "mu": st.mu, "gap": st.gap, "N0": st.N0, "n_avg": st.n_avg, "S": thermal_entropy(st),
    }
    return [row], tuple(row)


def cmd_zero_entropy(args):
    Ns = parse_ladder(args.N, factor=10.0)
    if not Ns:
        raise UsageError("empty particle-number list")
    frac = args.fraction
    if not 0 < frac < 1:
        raise DomainError(f"block fraction must lie in (0, 1), got {frac}")
    # LA / L = frac exactly as a ratio of integers
    denom = 1 << 30
    LA, L = round(frac * denom), denom
    rows = []
    for N in Ns:
        E = entanglement_entropy_exact(schmidt_spectrum(N, LA, L))
        rows.append({
            "N": N,
            "fraction": frac,
            "E_exact": E,
            "E_gauss": entropy_gaussian_asymptotic(N) if frac == 0.5 else math.nan,
            "E_poisson": entropy_poisson_asymptotic(N * frac),
        })
    x = np.log([r["N"] for r in rows])
    y = np.array([r["E_exact"] for r in rows])
    slopes = np.full(len(rows), math.nan)
    slopes[1:] = np.diff(y) / np.diff(x)
    for r, s in zip(rows, slopes):
        r["slope"] = float(s)
    return rows, ("N", "fraction", "E_exact", "E_gauss", "E_poisson", "slope")


def _report_row(args, rep) -> dict:
    return {
        "model": args.model, "gamma": _gamma_cell(args), "t": args.t, "n": args.n,
        "beta": rep.beta, "L": rep.L, "LA": rep.LA, "LB": rep.LB, "mu": rep.mu, "N0": rep.N0,
        "n_avg": rep.n_avg, "E_A": rep.E_A, "E_B": rep.E_B, "S": rep.S, "E_M": rep.E_M, "error": "",
    }


def cmd_mutual_info(args):
    beta = _betas(args, many=False)[0]
    rep = mutual_information(
        _model(args, args.L), beta, args.n, args.LA, tol=args.tol, thermo_limit=args.thermo_limit
    )
    return [_report_row(args, rep)], SWEEP_COLUMNS


def _workers(args, argv) -> int:
    # flag > environment > config file > 1
    if _flag_given(argv, "--workers"):
        w = args.workers
    elif os.environ.get(WORKERS_ENV):
        try:
            w = int(os.environ[WORKERS_ENV])
        except ValueError:
            raise UsageError(f"{WORKERS_ENV} must be an integer") from None
    else:
        w = args.workers if args.workers is not None else 1
    if w < 1:
        raise UsageError(f"worker count must be >= 1, got {w}")
    return w


def _row_key(row) -> tuple:
    return (float(row["beta"]), int(row["L"]))


def cmd_sweep(args, argv):
    betas = _betas(args, many=True)
    sizes = parse_ladder(args.sizes, factor=2.0)
    part = args.partition
    if part != "equal":
        try:
            part = float(part)
        except ValueError:
            raise UsageError(f"--partition must be 'equal' or a number, got {args.partition!r}") from None
    spec = SweepSpec(
        kind=args.model, betas=betas, sizes=sizes, gamma=args.gamma, t=args.t,
        n_target=args.n, partition=part, thermo_limit=args.thermo_limit,
    )
    # betas are round-tripped through the output format so resumed keys match
    spec = SweepSpec(**{**spec.__dict__, "betas": tuple(float("%.12e" % b) for b in spec.betas)})
    kept = []
    if args.resume and args.output and Path(args.output).exists():
        kept = [r for r in read_rows(args.output) if not r.get("error")]
    done = {_row_key(r) for r in kept}
    records = run_sweep(spec, workers=_workers(args, argv), done=done)
    rows = kept + [rec.as_row(spec) for rec in records]
    rows.sort(key=_row_key)
    return rows, SWEEP_COLUMNS


def cmd_fit(args):
    src = sys.stdin if args.input == "-" else args.input
    try:
        rows = read_rows(src)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"cannot parse {args.input}: {exc}") from None
    window = None
    if args.window:
        w = parse_ladder(args.window.replace(":", ","), integer=False)
        if len(w) != 2:
            raise UsageError("--window takes LA_min:LA_max")
        window = (w[0], w[1])
    groups = {}
    for r in rows:
        try:
            if r.get("error") or not math.isfinite(float(r["E_M"])):
                continue
            groups.setdefault(float(r["beta"]), []).append((float(r["LA"]), float(r["E_M"])))
        except (KeyError, TypeError, ValueError):
            raise UsageError("fit input needs beta, LA and E_M columns") from None
    if not groups:
        raise InsufficientDataError("no usable rows to fit; need at least 4")
    out = []
    for beta in sorted(groups):
        fit = fit_log_scaling(groups[beta], window)
        out.append({
            "beta": beta, "slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared,
            "stderr": fit.stderr, "LA_min": fit.window[0], "LA_max": fit.window[1], "n_points": fit.n_points,
        })
    return out, ("beta", "slope", "intercept", "r_squared", "stderr", "LA_min", "LA_max", "n_points")


def _fail(kind: str, msg, code: int) -> int:
    text = " ".join(str(msg).split())
    print(f"error: {kind}: {text}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        cfg_path = _config_path(argv)
        if cfg_path is not None:
            cfg = _read_config(cfg_path)
            cmd = next((a for a in argv if a in _subparsers(parser)), None)
            if cmd is not None:
                _apply_config(_subparsers(parser)[cmd], cfg)
        args = parser.parse_args(argv)
        handlers = {
            "dispersion": cmd_dispersion,
            "tc": cmd_tc,
            "mu": cmd_mu,
            "zero-entropy": cmd_zero_entropy,
            "mutual-info": cmd_mutual_info,
            "fit": cmd_fit,
        }
        if args.command == "sweep":
            rows, cols = cmd_sweep(args, argv)
        else:
            rows, cols = handlers[args.command](args)
        text = render(rows, cols, args.format)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except InsufficientDataError as exc:
        return _fail("insufficient-data", exc, EXIT_DATA)
    except DomainError as exc:
        return _fail("domain", exc, EXIT_USAGE)
    except (ConvergenceError, PositivityError) as exc:
        return _fail("convergence" if isinstance(exc, ConvergenceError) else "positivity", exc, EXIT_NUMERIC)
    except BoseMIError as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)

    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            return _fail("io", f"cannot write {args.output}: {exc.strerror}", EXIT_USAGE)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
