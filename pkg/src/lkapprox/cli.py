"""Command-line front end.

    lk <command> --config <path-or-name> [options]

Commands: spectrum, build, eval, k1, critical-delay, sweep, validate.
Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O
error.  Configs are JSON; the names example1, example2, and delay-free
resolve to packaged configurations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from . import functional, oracle
from .discretize import (
    CostWeights,
    FunctionSpec,
    RfdeSystem,
    build_cheb_model,
    build_leg_model,
)
from .linalg import (
    ConvergenceError,
    NumericalFailureError,
    RangeError,
    SingularOperatorError,
    eigenvalues,
)
from .oracle import LyapunovConditionError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_NUMERIC_ERRORS = (
    ConvergenceError,
    SingularOperatorError,
    NumericalFailureError,
    RangeError,
    LyapunovConditionError,
    np.linalg.LinAlgError,
    ValueError,
    ArithmeticError,
)

_BUILTIN_CONFIGS = {
    "example1": "example1.json",
    "example2": "example2.json",
    "delay-free": "delay_free.json",
}


class ConfigError(Exception):
    pass


class RunConfig:
    def __init__(self, system, weights, scheme, N, phi, phi_label, allow_incomplete):
        self.system = system
        self.weights = weights
        self.scheme = scheme
        self.N = N
        self.phi = phi
        self.phi_label = phi_label
        self.allow_incomplete = allow_incomplete


def _parse_phi(raw_phi, n):
    """A config segment: a built-in name, {"constant": vec}, or
    {"polynomial": rows of theta-monomial coefficients}."""
    if raw_phi is None:
        return FunctionSpec.named("one", n), "one"
    if isinstance(raw_phi, str):
        try:
            return FunctionSpec.named(raw_phi, n), raw_phi
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if isinstance(raw_phi, dict) and len(raw_phi) == 1:
        kind, data = next(iter(raw_phi.items()))
        try:
            if kind == "constant":
                spec = FunctionSpec.constant(np.asarray(data, dtype=float))
            elif kind == "polynomial":
                spec = FunctionSpec.polynomial(np.asarray(data, dtype=float))
            else:
                raise ConfigError(f"unknown phi form {kind!r}")
            if spec.n != n:
                raise ConfigError(
                    f"phi is {spec.n}-dimensional but the system is {n}-dimensional"
                )
            return spec, kind
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid phi: {exc}") from exc
    raise ConfigError(
        "config phi must be a built-in name, {\"constant\": [...]}, "
        "or {\"polynomial\": [[...], ...]}"
    )


def _load_config(path_or_name):
    if path_or_name in _BUILTIN_CONFIGS and not os.path.exists(path_or_name):
        text = (
            resources.files("lkapprox")
            .joinpath("configs")
            .joinpath(_BUILTIN_CONFIGS[path_or_name])
            .read_text(encoding="utf-8")
        )
    else:
        try:
            with open(path_or_name, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path_or_name!r}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    for key in ("A0", "A1", "h", "Q0", "Q1"):
        if key not in raw:
            raise ConfigError(f"config is missing required key {key!r}")
    try:
        A0 = np.asarray(raw["A0"], dtype=float)
        system = RfdeSystem(A0=A0, A1=np.asarray(raw["A1"], dtype=float),
                            h=float(raw["h"]))
        n = system.n
        Q2 = raw.get("Q2")
        Q2 = np.zeros((n, n)) if Q2 is None else np.asarray(Q2, dtype=float)
        weights = CostWeights(
            Q0=np.asarray(raw["Q0"], dtype=float),
            Q1=np.asarray(raw["Q1"], dtype=float),
            Q2=Q2,
        )
        if weights.n != n:
            raise ValueError("weight and system dimensions differ")
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc

    scheme = raw.get("scheme", "legendre")
    if scheme not in ("cheb", "legendre"):
        raise ConfigError(f"config scheme must be 'cheb' or 'legendre', got {scheme!r}")
    N = raw.get("N", 20)
    if not isinstance(N, int) or N < 1:
        raise ConfigError(f"config N must be an integer >= 1, got {N!r}")
    phi, phi_label = _parse_phi(raw.get("phi"), n)
    allow_incomplete = raw.get("allow_incomplete", False)
    if not isinstance(allow_incomplete, bool):
        raise ConfigError("config allow_incomplete must be a boolean")
    return RunConfig(system, weights, scheme, N, phi, phi_label, allow_incomplete)


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            # Strict JSON has no Infinity/NaN literals.
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        return x
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    return obj


def _emit_json(payload, out_path):
    text = json.dumps(_jsonify(payload), indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x):
    return f"{x:.17g}"


def _scheme_and_N(cfg, args):
    scheme = getattr(args, "scheme", None) or cfg.scheme
    N = getattr(args, "N", None)
    if N is None:
        N = cfg.N
    if N < 1:
        raise ConfigError(f"N must be an integer >= 1, got {N}")
    return scheme, int(N)


def _build_model(cfg, scheme, N):
    builder = build_cheb_model if scheme == "cheb" else build_leg_model
    return builder(cfg.system, N)


def _spectrum_payload(cfg, scheme, N):
    model = _build_model(cfg, scheme, N)
    lam = sorted(eigenvalues(model.A), key=lambda z: (-z.real, -z.imag))
    rightmost = lam[0]
    return {
        "scheme": scheme,
        "N": N,
        "eigenvalues": [[z.real, z.imag] for z in lam],
        "rightmost": [rightmost.real, rightmost.imag],
        "hurwitz": rightmost.real < 0.0,
    }


def cmd_spectrum(cfg, args):
    scheme, N = _scheme_and_N(cfg, args)
    if args.both:
        payload = {s: _spectrum_payload(cfg, s, N) for s in ("cheb", "legendre")}
    else:
        payload = _spectrum_payload(cfg, scheme, N)
    _emit_json(payload, args.out)
    return EXIT_OK


def _build_functional(cfg, args):
    scheme, N = _scheme_and_N(cfg, args)
    split = not getattr(args, "no_split", False)
    return functional.build_functional(
        cfg.system, cfg.weights, scheme=scheme, N=N, split=split,
        allow_incomplete=cfg.allow_incomplete,
    )


def _build_summary(fa):
    return {
        "scheme": fa.scheme,
        "N": fa.N,
        "n": fa.system.n,
        "h": fa.system.h,
        "split": fa.split,
        "coordinates": "chebyshev-values" if fa.scheme == "cheb" else "legendre-coefficients",
        "residual": fa.residual,
        "hurwitz": fa.hurwitz,
        "max_re": fa.max_re,
        "psd": fa.psd,
        "lam_min": fa.lam_min,
        "lam_max": fa.lam_max,
    }


def cmd_build(cfg, args):
    fa = _build_functional(cfg, args)
    summary = _build_summary(fa)
    if args.out:
        P = np.ascontiguousarray(fa.P, dtype="<f8")
        with open(args.out, "wb") as fh:
            fh.write(P.tobytes())
        meta = dict(summary)
        meta["rows"] = P.shape[0]
        meta["cols"] = P.shape[1]
        meta["dtype"] = "float64-le"
        meta["order"] = "row-major"
        _emit_json(meta, args.out + ".meta.json")
    else:
        _emit_json(summary, None)
    return EXIT_OK


def cmd_eval(cfg, args):
    fa = _build_functional(cfg, args)
    if args.phi:
        phi, label = FunctionSpec.named(args.phi, cfg.system.n), args.phi
    else:
        phi, label = cfg.phi, cfg.phi_label
    value = functional.evaluate(fa, phi)
    payload = _build_summary(fa)
    payload.update({"phi": label, "value": value})
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_k1(cfg, args):
    fa = _build_functional(cfg, args)
    payload = _build_summary(fa)
    payload.update({
        "k1": functional.k1(fa, check_psd=False),
        "baseline_norm_ratio": functional.baseline_k1(cfg.system, cfg.weights, "norm-ratio"),
        "baseline_alpha_max": functional.baseline_k1(cfg.system, cfg.weights, "alpha-max"),
        "delay_free": not bool(np.any(cfg.system.A1)),
    })
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_critical_delay(cfg, args):
    scheme, N = _scheme_and_N(cfg, args)
    lo, hi = _parse_range(args.bracket or "1:10")
    tol = args.tol if args.tol is not None else 1e-4
    h_crit = functional.critical_delay(
        cfg.system, scheme=scheme, N=N, bracket=(lo, hi), tol=tol
    )
    _emit_json(
        {"scheme": scheme, "N": N, "tol": tol, "bracket": [lo, hi], "h_critical": h_crit},
        args.out,
    )
    return EXIT_OK


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"range must look like a:b, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"range endpoints must be numbers: {text!r}") from exc
    if not lo < hi:
        raise ConfigError(f"range must be increasing, got {text!r}")
    return lo, hi


def _sweep_point(cfg, scheme, axis, value, N_fixed):
    t0 = time.perf_counter()
    if axis == "N":
        system, N = cfg.system, int(value)
    else:
        system = RfdeSystem(A0=cfg.system.A0, A1=cfg.system.A1, h=float(value))
        N = N_fixed
    fa = functional.build_functional(
        system, cfg.weights, scheme=scheme, N=N,
        allow_incomplete=cfg.allow_incomplete,
    )
    row = {
        "k1": functional.k1(fa, check_psd=False),
        "max_re": fa.max_re,
        "psd": fa.psd,
        "residual": fa.residual,
    }
    row["wall_time_ms"] = 1e3 * (time.perf_counter() - t0)
    return row


def cmd_sweep(cfg, args):
    if not args.axis:
        raise ConfigError("sweep requires --axis N|h")
    if not args.range:
        raise ConfigError("sweep requires --range a:b")
    steps = args.steps or 10
    if steps < 1:
        raise ConfigError("--steps must be >= 1")
    lo, hi = _parse_range(args.range)
    scheme, N_fixed = _scheme_and_N(cfg, args)
    if args.axis == "N":
        values = [int(round(v)) for v in np.linspace(lo, hi, steps)]
        if min(values) < 1:
            raise ConfigError("N sweep range must stay >= 1")
    else:
        values = [float(v) for v in np.linspace(lo, hi, steps)]
        if lo <= 0.0:
            raise ConfigError("h sweep range must stay positive")

    with_baselines = args.axis == "h"
    if with_baselines:
        base_nr = functional.baseline_k1(cfg.system, cfg.weights, "norm-ratio")
        base_am = functional.baseline_k1(cfg.system, cfg.weights, "alpha-max")

    env = os.environ.get("LK_THREADS", "")
    try:
        workers = int(env) if env else min(4, os.cpu_count() or 1)
    except ValueError:
        raise ConfigError(f"LK_THREADS must be an integer, got {env!r}")
    if workers < 1:
        raise ConfigError("LK_THREADS must be >= 1")

    def task(value):
        try:
            return _sweep_point(cfg, scheme, args.axis, value, N_fixed), ""
        except _NUMERIC_ERRORS as exc:
            return None, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(task, values))

    header = [args.axis, "k1", "max_re", "psd", "residual", "wall_time_ms"]
    if with_baselines:
        header += ["baseline_norm_ratio", "baseline_alpha_max"]
    header.append("error")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    worst = EXIT_OK
    for value, (row, err) in zip(values, results):
        cells = [str(value) if args.axis == "N" else _fmt(value)]
        if row is None:
            worst = EXIT_NUMERIC
            cells += ["nan"] * 2 + ["false", "nan", "nan"]
            if with_baselines:
                cells += ["nan", "nan"]
            cells.append(err)
        else:
            cells += [
                _fmt(row["k1"]),
                _fmt(row["max_re"]),
                "true" if row["psd"] else "false",
                _fmt(row["residual"]),
                _fmt(row["wall_time_ms"]),
            ]
            if with_baselines:
                cells += [_fmt(base_nr), _fmt(base_am)]
            cells.append("")
        writer.writerow(cells)

    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return worst


def cmd_validate(cfg, args):
    N = _scheme_and_N(cfg, args)[1]
    report = {"N": N, "failures": {}}
    fas = {}
    for scheme in ("cheb", "legendre"):
        try:
            fas[scheme] = functional.build_functional(
                cfg.system, cfg.weights, scheme=scheme, N=N,
                allow_incomplete=cfg.allow_incomplete,
            )
        except _NUMERIC_ERRORS as exc:
            report["failures"][scheme] = f"{type(exc).__name__}: {exc}"

    dl = None
    try:
        dl = oracle.build_delay_lyap(cfg.system, cfg.weights)
        report["psi_residuals"] = oracle.property_residuals(dl)
        report["psi_cond"] = dl.cond
    except _NUMERIC_ERRORS as exc:
        report["failures"]["psi"] = f"{type(exc).__name__}: {exc}"

    mats = {}
    if "cheb" in fas:
        mats["cheb"] = fas["cheb"].grid_matrix()
    if "legendre" in fas:
        mats["legendre"] = fas["legendre"].grid_matrix()
    if dl is not None:
        try:
            mats["quad_cc"], _ = oracle.assemble_quad(dl, cfg.weights, rule="cc", N=N)
        except _NUMERIC_ERRORS as exc:
            report["failures"]["quad_cc"] = f"{type(exc).__name__}: {exc}"

    deviations = {}
    names = sorted(mats)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            deviations[f"{a}_vs_{b}"] = float(np.max(np.abs(mats[a] - mats[b])))
    if mats:
        scale = max(float(np.max(np.abs(M))) for M in mats.values())
        report["matrix_scale"] = scale
    report["matrix_deviation"] = deviations

    k1s = {}
    for scheme, fa in fas.items():
        try:
            k1s[scheme] = functional.k1(fa, check_psd=False)
        except _NUMERIC_ERRORS as exc:
            report["failures"][f"k1_{scheme}"] = f"{type(exc).__name__}: {exc}"
    if dl is not None:
        for rule in ("cc", "gauss"):
            try:
                k1s[f"quad_{rule}"] = oracle.k1_quad(
                    dl, cfg.weights, rule=rule, N=N, check_psd=False
                )
            except _NUMERIC_ERRORS as exc:
                report["failures"][f"k1_quad_{rule}"] = f"{type(exc).__name__}: {exc}"
    if k1s:
        vals = list(k1s.values())
        spread = max(vals) - min(vals)
        k1s["rel_spread"] = spread / max(1e-300, abs(max(vals, key=abs)))
    report["k1"] = k1s

    _emit_json(report, args.out)
    return EXIT_NUMERIC if report["failures"] else EXIT_OK


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "build": cmd_build,
    "eval": cmd_eval,
    "k1": cmd_k1,
    "critical-delay": cmd_critical_delay,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def _make_parser():
    parser = argparse.ArgumentParser(
        prog="lk",
        description="Spectral approximations of complete-type "
                    "Lyapunov-Krasovskii functionals for one-delay systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="JSON config path, or example1|example2|delay-free")
        p.add_argument("--scheme", choices=("cheb", "legendre"))
        p.add_argument("-N", type=int, dest="N")
        p.add_argument("--out")
        p.add_argument("--tol", type=float)
        if name == "spectrum":
            p.add_argument("--both", action="store_true",
                           help="report both schemes")
        if name in ("build", "eval", "k1"):
            p.add_argument("--no-split", action="store_true", dest="no_split",
                           help="use the direct grid cost matrix (cheb scheme)")
        if name == "eval":
            p.add_argument("--phi", choices=("one", "sin", "exp-decay"))
        if name == "critical-delay":
            p.add_argument("--bracket", help="h bracket a:b (default 1:10)")
        if name == "sweep":
            p.add_argument("--axis", choices=("N", "h"))
            p.add_argument("--range", help="sweep range a:b")
            p.add_argument("--steps", type=int)
    return parser


def main(argv=None):
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"lk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"lk: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _NUMERIC_ERRORS as exc:
        print(f"lk: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
