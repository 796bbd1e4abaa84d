"""Command line front end for the reset-walk library.

Eight subcommands expose the library routes:

  exact       one ruin probability by the linear-solve route
  spectral    one ruin probability by the closed-form spectral route
  mc          one Monte Carlo estimate with standard error
  table       bundled reference tables via --preset: ruin probabilities,
              with Monte Carlo companion rows for the two table presets
  derivative  d ruin / d gamma at one site, or full profile series via
              --preset
  critical    sign-change report for one (a, p, gamma): every interior
              h_z, the interpolated crossing, and the bracketing sites
  sweep       structural sweeps keyed by the parity of a: midpoint
              invariance for even a, central-site and bias-shift
              summaries for odd a
  validate    cross-route consistency battery; exit 1 on any violation

Output is CSV by default for the value commands and JSON for critical,
sweep and validate; --format overrides. The CSV schema is fixed: header
``a,z,p,gamma,method,value,stderr,seed``, empty cells for fields a row
does not carry, floats at 10 significant digits. JSON output is one
object with ``spec``, ``results`` and ``checks`` keys; critical adds
``z_dagger``, ``bracket`` and ``midpoint_exact`` alongside them.

Identical invocations produce byte-identical output, Monte Carlo rows
included (counter-based generator keyed by --seed). RESET_RUIN_THREADS
caps simulation workers. --out writes through a temp file in the target
directory followed by os.replace, so readers never observe a partial
file. --config FILE supplies flat key=value defaults; flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from . import critical, montecarlo, oracle, renewal, spectral_core
from .errors import NumericError, RunawayError, StructuralViolationError
from .spectral_core import WalkConfig

_CSV_FIELDS = ("a", "z", "p", "gamma", "method", "value", "stderr", "seed")

# grids for sweep/validate; tolerances mirror the acceptance gate
_ROUTE_PS = (0.4, 0.5, 0.6)
_ROUTE_GAMMAS = (0.1, 0.3, 0.6, 0.9)
_MIDPOINT_AS = (2, 4, 10, 20, 50)
_MIDPOINT_PS = tuple(round(0.2 + 0.1 * k, 10) for k in range(7))
_MIDPOINT_GAMMAS = tuple(k / 100.0 for k in range(1, 100))
_DOOB_PS = tuple(round(0.1 * k, 10) for k in range(1, 10))

_TABLE_GAMMAS = (0.3, 0.6, 0.9)
_PROFILE_GAMMAS = (0.0, 0.3, 0.6, 0.9)
# derivative series as plotted: symmetric at three reset rates, then
# the two biased companions at the lowest rate
_SERIES = ((0.5, 0.3), (0.5, 0.6), (0.5, 0.9), (0.4, 0.3), (0.6, 0.3))

_TABLE_PRESETS = {
    "paper-table-1": ("table", 5, 0.6),
    "paper-table-2": ("table", 5, 0.5),
    "paper-fig-2": ("profile", 5, 0.6),
    "paper-fig-3": ("profile", 5, 0.5),
}
_DERIVATIVE_PRESETS = {"paper-fig-4": 10, "paper-fig-5": 11}

_JSON_DEFAULT = frozenset({"critical", "sweep", "validate"})

_CONFIG_CASTS = {
    "a": int,
    "z": int,
    "p": float,
    "gamma": float,
    "n_sim": int,
    "seed": int,
    "format": str,
    "preset": str,
    "out": str,
}


def _row(a=None, z=None, p=None, gamma=None, method="", value=None,
         stderr=None, seed=None):
    return {
        "a": a, "z": z, "p": p, "gamma": gamma,
        "method": method, "value": value, "stderr": stderr, "seed": seed,
    }


def _check(name, tolerance, observed, passed=None):
    if passed is None:
        passed = observed <= tolerance
    return {
        "name": name,
        "tolerance": tolerance,
        "observed": observed,
        "pass": bool(passed),
    }


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return "%.10g" % value


def _render_csv(rows, checks) -> str:
    lines = [",".join(_CSV_FIELDS)]
    for row in rows:
        lines.append(",".join(_cell(row[f]) for f in _CSV_FIELDS))
    # CSV has no checks section; surface them as rows so nothing is lost
    for chk in checks:
        lines.append(",".join(_cell(v) for v in (
            None, None, None, None, chk["name"], chk["observed"], None, None)))
    return "\n".join(lines) + "\n"


def _render_json(spec, rows, checks, extras=None) -> str:
    obj = {"spec": spec}
    if extras:
        obj.update(extras)
    obj["results"] = rows
    obj["checks"] = checks
    return json.dumps(obj, indent=2) + "\n"


def _write_atomic(path: str, text: str) -> None:
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target),
                               prefix=".resetruin-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    options = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_CASTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        options[key] = value.strip()
    return options


def _apply_config(args) -> None:
    options = _load_config(args.config)
    for key, raw in options.items():
        if getattr(args, key) is not None:
            continue  # flags override the file
        cast = _CONFIG_CASTS[key]
        try:
            setattr(args, key, cast(raw))
        except ValueError as exc:
            raise ValueError(
                f"config key {key}={raw!r} is not a valid {cast.__name__}"
            ) from exc


def _need(args, *names) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names
               if getattr(args, n) is None]
    if missing:
        raise ValueError(
            f"{args.command} requires {', '.join(missing)}")


def _point_config(args) -> WalkConfig:
    _need(args, "a", "z", "p", "gamma")
    return WalkConfig(a=args.a, z=args.z, p=args.p, gamma=args.gamma)


def _cmd_exact(args):
    cfg = _point_config(args)
    value = oracle.exact_ruin(cfg)
    return [_row(cfg.a, cfg.z, cfg.p, cfg.gamma, "exact", value)], [], None, True


def _cmd_spectral(args):
    cfg = _point_config(args)
    value = spectral_core.ruin_probability_spectral(cfg)
    return [_row(cfg.a, cfg.z, cfg.p, cfg.gamma, "spectral", value)], [], None, True


def _cmd_mc(args):
    cfg = _point_config(args)
    est = montecarlo.estimate_ruin(cfg, n_sim=args.n_sim, seed=args.seed)
    row = _row(cfg.a, cfg.z, cfg.p, cfg.gamma, "mc",
               est.p_hat, est.stderr, args.seed)
    return [row], [], None, True


def _table_rows(a, p, n_sim, seed):
    rows = []
    for z in range(a + 1):
        for gamma in _TABLE_GAMMAS:
            cfg = WalkConfig(a=a, z=z, p=p, gamma=gamma)
            theory = spectral_core.ruin_probability_spectral(cfg)
            rows.append(_row(a, z, p, gamma, "spectral", theory))
            if z == 0 or z == a:
                # walk starts absorbed; the estimate is exact with no spread
                estimate, err = (1.0 if z == 0 else 0.0), 0.0
            else:
                est = montecarlo.estimate_ruin(cfg, n_sim=n_sim, seed=seed)
                estimate, err = est.p_hat, est.stderr
            rows.append(_row(a, z, p, gamma, "mc", estimate, err, seed))
    return rows


def _profile_rows(a, p):
    rows = []
    for gamma in _PROFILE_GAMMAS:
        profile = spectral_core.ruin_profile_spectral(a, p, gamma)
        for z in range(a + 1):
            rows.append(_row(a, z, p, gamma, "spectral", float(profile[z])))
    return rows


def _cmd_table(args):
    _need(args, "preset")
    try:
        kind, a, p = _TABLE_PRESETS[args.preset]
    except KeyError:
        raise ValueError(
            f"unknown table preset {args.preset!r}; choose from "
            f"{', '.join(sorted(_TABLE_PRESETS))}") from None
    if kind == "table":
        rows = _table_rows(a, p, args.n_sim, args.seed)
    else:
        rows = _profile_rows(a, p)
    return rows, [], None, True


def _cmd_derivative(args):
    if args.preset is not None:
        try:
            a = _DERIVATIVE_PRESETS[args.preset]
        except KeyError:
            raise ValueError(
                f"unknown derivative preset {args.preset!r}; choose from "
                f"{', '.join(sorted(_DERIVATIVE_PRESETS))}") from None
        rows = []
        for p, gamma in _SERIES:
            for z in range(1, a):
                h = critical.derivative(WalkConfig(a=a, z=z, p=p, gamma=gamma)).h
                rows.append(_row(a, z, p, gamma, "derivative", h))
        return rows, [], None, True
    cfg = _point_config(args)
    h = critical.derivative(cfg).h
    return [_row(cfg.a, cfg.z, cfg.p, cfg.gamma, "derivative", h)], [], None, True


def _cmd_critical(args):
    _need(args, "a", "p", "gamma")
    report = critical.sign_change(args.a, args.p, args.gamma)
    rows = [_row(args.a, z, args.p, args.gamma, "derivative", h)
            for z, h in enumerate(report.h_values, start=1)]
    extras = {
        "z_dagger": report.z_cross,
        "bracket": list(report.bracket),
        "midpoint_exact": report.midpoint_exact,
    }
    return rows, [], extras, True


def _sweep_even(a):
    rows = [_row(a, a // 2, p, None, "midpoint", spectral_core.midpoint_value(a, p))
            for p in _MIDPOINT_PS]
    deviation = critical.midpoint_invariance_sweep(
        a, _MIDPOINT_PS, _MIDPOINT_GAMMAS)
    return rows, [_check("midpoint-invariance", 1e-10, deviation)]


def _sweep_odd(a, gamma):
    rows = []
    worst_edge = math.inf
    extra_flips = 0
    for p in _ROUTE_PS:
        report = critical.sign_change(a, p, gamma)
        worst_edge = min(worst_edge,
                         report.h_values[0], -report.h_values[-1])
        signs = [s for s in (0 if h == 0.0 else (1 if h > 0.0 else -1)
                             for h in report.h_values) if s]
        flips = sum(s1 != s2 for s1, s2 in zip(signs, signs[1:]))
        extra_flips = max(extra_flips, abs(flips - 1))
        for z in ((a - 1) // 2, (a + 1) // 2):
            rows.append(_row(a, z, p, gamma, "derivative",
                             report.h_values[z - 1]))
    bound = critical.central_site_bound(a, _ROUTE_PS, gamma)
    shift = critical.bias_shift_coefficient(a, gamma)
    rows.append(_row(a, None, None, gamma, "central-bound", bound))
    rows.append(_row(a, None, None, gamma, "bias-shift", shift))
    checks = [
        _check("single-sign-change", 0.0, float(extra_flips)),
        _check("boundary-signs", 0.0, worst_edge, passed=worst_edge > 0.0),
        _check("bias-shift-positive", 0.0, shift, passed=shift > 0.0),
    ]
    return rows, checks


def _cmd_sweep(args):
    _need(args, "a")
    if args.a % 2 == 0:
        rows, checks = _sweep_even(args.a)
    else:
        _need(args, "gamma")
        rows, checks = _sweep_odd(args.a, args.gamma)
    return rows, checks, None, all(c["pass"] for c in checks)


def _cmd_validate(args):
    a_cap = args.a if args.a is not None else 30
    if a_cap < 2:
        raise ValueError(f"validate needs --a >= 2, got {a_cap}")
    checks = []

    dev = 0.0
    for a in range(2, a_cap + 1):
        for p in _ROUTE_PS:
            for gamma in _ROUTE_GAMMAS:
                profile = oracle.exact_ruin_profile(a, p, gamma)
                for z in range(1, a):
                    cfg = WalkConfig(a=a, z=z, p=p, gamma=gamma)
                    qs = spectral_core.ruin_probability_spectral(cfg)
                    qr = renewal.ruin_probability_renewal(cfg)
                    qo = float(profile[z])
                    dev = max(dev, abs(qs - qr), abs(qs - qo), abs(qr - qo))
    checks.append(_check("three-route-agreement", 1e-10, dev))

    dev = max(critical.midpoint_invariance_sweep(a, _MIDPOINT_PS,
                                                 _MIDPOINT_GAMMAS)
              for a in _MIDPOINT_AS)
    checks.append(_check("midpoint-invariance", 1e-10, dev))

    doob_cap = min(a_cap, 20)
    dev = max(oracle.doob_symmetry_check(a, p)
              for a in range(2, doob_cap + 1) for p in _DOOB_PS)
    checks.append(_check("doob-symmetry", 1e-13, dev))

    dev = 0.0
    for a in range(2, doob_cap + 1):
        for p in _DOOB_PS:
            computed = sorted(oracle.symmetrized_eigenvalues(a, p))
            stated = sorted(spectral_core.eigenvalue(a, p, nu)
                            for nu in range(1, a))
            dev = max(dev, max(abs(c - s)
                               for c, s in zip(computed, stated)))
    checks.append(_check("eigenvalue-formula", 1e-12, dev))

    dev = 0.0
    for a in (5, 10, 20, 30):
        if a > a_cap:
            continue
        for p in (0.3, 0.5, 0.7):
            profile = spectral_core.ruin_profile_spectral(a, p, 0.0)
            for z in range(1, a):
                dev = max(dev, abs(float(profile[z])
                                   - spectral_core.classical_ruin(a, z, p)))
    checks.append(_check("classical-limit", 1e-12, dev))

    return [], checks, None, all(c["pass"] for c in checks)


_COMMANDS = {
    "exact": _cmd_exact,
    "spectral": _cmd_spectral,
    "mc": _cmd_mc,
    "table": _cmd_table,
    "derivative": _cmd_derivative,
    "critical": _cmd_critical,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
}

# fields echoed into the JSON spec object, per command
_SPEC_FIELDS = {
    "exact": ("a", "z", "p", "gamma"),
    "spectral": ("a", "z", "p", "gamma"),
    "mc": ("a", "z", "p", "gamma", "n_sim", "seed"),
    "table": ("preset", "n_sim", "seed"),
    "derivative": ("preset", "a", "z", "p", "gamma"),
    "critical": ("a", "p", "gamma"),
    "sweep": ("a", "gamma"),
    "validate": ("a",),
}


def _spec_object(args) -> dict:
    spec = {"command": args.command}
    for field in _SPEC_FIELDS[args.command]:
        value = getattr(args, field)
        if value is not None:
            spec[field] = value
    spec["format"] = args.format
    return spec


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--a", type=int, help="interval size; 0 and a absorb")
    shared.add_argument("--z", type=int, help="start and reset site")
    shared.add_argument("--p", type=float, help="right-step probability")
    shared.add_argument("--gamma", type=float, help="per-tick reset probability")
    shared.add_argument("--n-sim", type=int, dest="n_sim",
                        help="Monte Carlo trajectory count (default 100000)")
    shared.add_argument("--seed", type=int,
                        help="64-bit stream seed (default %d)"
                        % montecarlo.DEFAULT_SEED)
    shared.add_argument("--format", choices=("csv", "json"),
                        help="output format (csv is default for value "
                        "commands, json for critical/sweep/validate)")
    shared.add_argument("--preset", help="named reference dataset")
    shared.add_argument("--out", help="write output atomically to this path")
    shared.add_argument("--config",
                        help="flat key=value defaults file; flags override")

    parser = argparse.ArgumentParser(
        prog="resetruin",
        description="Ruin probabilities for a reset random walk on 0..a.",
    )
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")
    helps = {
        "exact": "linear-solve ruin probability at one point",
        "spectral": "closed-form ruin probability at one point",
        "mc": "Monte Carlo ruin estimate with standard error",
        "table": "reference tables (--preset paper-table-1, paper-table-2, "
                 "paper-fig-2, paper-fig-3)",
        "derivative": "d ruin / d gamma at one point, or --preset "
                      "paper-fig-4 / paper-fig-5 series",
        "critical": "sign-change report over the interior sites",
        "sweep": "parity-keyed structural sweep at one interval size",
        "validate": "cross-route consistency battery (--a caps the grid)",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[shared], help=text)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        if args.config is not None:
            _apply_config(args)
        if args.n_sim is None:
            args.n_sim = 100_000
        elif args.n_sim < 1:
            raise ValueError(f"--n-sim must be positive, got {args.n_sim}")
        if args.seed is None:
            args.seed = montecarlo.DEFAULT_SEED
        if args.format is None:
            args.format = "json" if args.command in _JSON_DEFAULT else "csv"
        rows, checks, extras, passed = _COMMANDS[args.command](args)
    except ValueError as exc:
        parser.error(str(exc))
    except StructuralViolationError as exc:
        print(f"resetruin: structural violation: {exc}", file=sys.stderr)
        return 1
    except (NumericError, RunawayError) as exc:
        print(f"resetruin: {exc}", file=sys.stderr)
        return 1

    if args.format == "csv":
        text = _render_csv(rows, checks)
    else:
        text = _render_json(_spec_object(args), rows, checks, extras)

    if args.out is not None:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0 if passed else 1
