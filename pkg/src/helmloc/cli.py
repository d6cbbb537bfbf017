"""Batch experiment driver.

One config file describes one experiment; a directory of configs runs as a
batch.  Exit status is 0 when every check passes, 1 when a check fails and 2
on a configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .bernstein import (
    BernsteinSymbol,
    as_symbol,
    bernstein_derivative,
    bernstein_eval,
    verify_derivative_bound,
    verify_nondegeneracy,
)
from .bessel import (
    bessel_j,
    build_expansion,
    expansion_eval,
    fd_expansion_eval,
    surface_fourier,
    verify_bessel_expansion,
    verify_fd_expansion,
)
from .kernel import CutoffSpec, kernel_profile, verify_kernel_bound
from .localization import (
    quotient_profile,
    run_contrapositive_check,
    run_forward_check,
    run_j0_check,
    spectral_support_profile,
)
from .multiplier import (
    helmholtz_residual,
    polyharmonic_residual,
    read_grid_function,
    sample,
    write_residual_csv,
)
from .symbols import BUILTIN_NAMES, Symbol, builtin_symbol, full_condition_report

COMMANDS = (
    "check-symbol",
    "bessel-table",
    "kernel-norm",
    "residual",
    "localize",
    "j0-check",
    "bernstein-verify",
)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

_SAFE_NAMES = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "tanh", "sinh", "cosh",
                 "arctan", "abs", "pi", "e", "where", "minimum", "maximum", "power")
}


_GRID_OPTIONS = ("u", "grid", "shape", "box")
OPTION_KEYS = {
    "check-symbol": ("mode", "kmax", "zmax_growth", "zmax_univalence"),
    "bessel-table": ("nu", "K", "lambdas", "target"),
    "kernel-norm": ("eps0", "r_max"),
    "residual": _GRID_OPTIONS + ("j0",),
    "localize": _GRID_OPTIONS + ("n_modes", "box_multiple", "delta"),
    "j0-check": ("window", "n_points"),
    "bernstein-verify": ("n_lambda",),
}
EXPERIMENT_KEYS = ("command", "d", "seed")
SYMBOL_KEYS = ("name", "s", "m", "expr", "holomorphic", "c1", "c2", "atoms", "z0", "eps0")


class ConfigError(ValueError):
    """Malformed or incomplete experiment config."""


@dataclass
class ExperimentConfig:
    command: str
    d: int
    seed: int
    symbol: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    source: str = ""

    def echo(self) -> dict:
        return {"command": self.command, "d": self.d, "seed": self.seed,
                "symbol": self.symbol, "options": self.options}


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        low = raw.strip().lower()
        if low in ("true", "yes", "on"):
            return True
        if low in ("false", "no", "off"):
            return False
        return raw.strip()


def _section(cp: configparser.ConfigParser, name: str) -> dict:
    if not cp.has_section(name):
        return {}
    return {k: _parse_value(v) for k, v in cp.items(name)}


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case sensitive (K vs k)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    if not cp.has_section("experiment"):
        raise ConfigError(f"{source}: missing [experiment] section")
    exp = _section(cp, "experiment")
    command = exp.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"{source}: [experiment] command = {command!r}; expected one of {COMMANDS}")
    d = exp.get("d", 1)
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ConfigError(f"{source}: [experiment] d must be an integer >= 1, got {d!r}")
    seed = exp.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"{source}: [experiment] seed must be an integer, got {seed!r}")
    symbol = _section(cp, "symbol")
    options = _section(cp, "options")
    for name, sec, allowed in (("experiment", exp, EXPERIMENT_KEYS), ("symbol", symbol, SYMBOL_KEYS),
                               ("options", options, OPTION_KEYS[command])):
        unknown = sorted(set(sec) - set(allowed))
        if unknown:
            raise ConfigError(f"{source}: [{name}] unknown key {unknown[0]!r}; allowed: {', '.join(allowed)}")
    extra = sorted(set(cp.sections()) - {"experiment", "symbol", "options"})
    if extra:
        raise ConfigError(f"{source}: unknown section [{extra[0]}]")
    needs_symbol = command not in ("bessel-table", "bernstein-verify")
    if needs_symbol and "name" not in symbol:
        raise ConfigError(f"{source}: command {command} needs a [symbol] section with a name")
    if command == "bernstein-verify" and symbol.get("name", "bernstein") != "bernstein":
        raise ConfigError(f"{source}: bernstein-verify needs [symbol] name = bernstein")
    return ExperimentConfig(command, d, seed, symbol, options, source)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text, str(path))


def _safe_eval(expr: str, **variables):
    try:
        code = compile(expr, "<expr>", "eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {expr!r}: {exc.msg}") from exc
    for name in code.co_names:
        if name not in _SAFE_NAMES and name not in variables:
            raise ConfigError(f"expression {expr!r} uses unknown name {name!r}")
    return eval(code, {"__builtins__": {}}, {**_SAFE_NAMES, **variables})


def _bernstein_from(spec: dict) -> BernsteinSymbol:
    try:
        atoms = tuple(tuple(a) for a in spec.get("atoms", []))
        if any(len(a) != 2 for a in atoms):
            raise ConfigError("atoms must be a list of [s, w] pairs")
        return BernsteinSymbol(float(spec.get("c1", 0.0)), float(spec.get("c2", 0.0)), atoms)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[symbol] bernstein spec: {exc}") from exc


def build_symbol(spec: dict) -> Symbol:
    name = spec.get("name")
    extra = {k: spec[k] for k in ("z0", "eps0") if k in spec}
    if name == "bernstein":
        sym = as_symbol(_bernstein_from(spec))
        return replace(sym, **extra)
    if name not in BUILTIN_NAMES:
        raise ConfigError(f"[symbol] name = {name!r}; expected one of {BUILTIN_NAMES + ('bernstein',)}")
    params = {k: v for k, v in spec.items() if k in ("s", "m")}
    try:
        if name == "custom":
            expr = spec.get("expr")
            if not isinstance(expr, str):
                raise ConfigError("[symbol] custom needs expr = <expression in z>")
            _safe_eval(expr, z=np.array([1.0]))
            func = _ExprFunc(expr)
            return builtin_symbol("custom", {"expr": expr}, func=func,
                                  holomorphic=bool(spec.get("holomorphic", False)), **extra)
        return builtin_symbol(name, params, **extra)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[symbol] {exc}") from exc


class _ExprFunc:
    """Picklable evaluator for a config expression in z."""

    def __init__(self, expr: str):
        self.expr = expr

    def __call__(self, z):
        z = np.asarray(z)
        return np.broadcast_to(_safe_eval(self.expr, z=z), z.shape) * 1.0


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def _check(name: str, passed: bool, metrics: dict, witnesses=None) -> dict:
    return {"name": name, "pass": bool(passed), "metrics": metrics, "witnesses": witnesses or []}


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _grid_function(cfg: ExperimentConfig):
    opts = cfg.options
    if "grid" in opts:
        gf = read_grid_function(opts["grid"])
        if gf.d != cfg.d:
            raise ConfigError(f"grid container has d = {gf.d}, config has d = {cfg.d}")
        return gf
    expr = opts.get("u")
    if not isinstance(expr, str):
        raise ConfigError("[options] needs u = <expression in x1..xd> or grid = <path>")
    shape = opts.get("shape", [16] * cfg.d)
    box = opts.get("box", [2 * math.pi] * cfg.d)
    if not (isinstance(shape, list) and len(shape) == cfg.d and all(isinstance(n, int) and n > 0 and n % 2 == 0 for n in shape)):
        raise ConfigError(f"[options] shape must list {cfg.d} positive even integers, got {shape!r}")
    if not (isinstance(box, list) and len(box) == cfg.d):
        raise ConfigError(f"[options] box must list {cfg.d} lengths, got {box!r}")
    names = [f"x{i + 1}" for i in range(cfg.d)]
    probe = {n: np.zeros(1) for n in names}
    _safe_eval(expr, **probe)
    return sample(lambda *xs: _safe_eval(expr, **dict(zip(names, xs))), shape, box)


def cmd_check_symbol(cfg, out: Path, threshold):
    sym = build_symbol(cfg.symbol)
    mode = cfg.options.get("mode", "strict_c")
    if mode not in ("strict_c", "general_c3"):
        raise ConfigError(f"[options] mode must be strict_c or general_c3, got {mode!r}")
    kw = {k: cfg.options[k] for k in ("kmax", "zmax_growth", "zmax_univalence") if k in cfg.options}
    rep = full_condition_report(sym, cfg.d, mode, **kw)
    data = rep.to_dict()
    wit = data["failure_witnesses"]
    checks = [
        _check("growth", rep.growth_pass, {"exponents": rep.growth_exponents},
               [w for w in wit if w["tag"].startswith("a")]),
        _check("singularity", rep.singularity_pass, {"terms": rep.singularity_terms},
               [w for w in wit if w["tag"].startswith("b")]),
        _check("univalence", rep.univalence_pass,
               {"phi_at_one": rep.phi_at_one, "j0": rep.j0,
                "first_nonzero_derivative": rep.first_nonzero_derivative},
               [w for w in wit if w["tag"].startswith("c")]),
    ]
    rows = [("growth", k, v) for k, v in enumerate(rep.growth_exponents)]
    rows += [("singularity", j, v) for j, v in enumerate(rep.singularity_terms)]
    _write_csv(out / "conditions.csv", ("quantity", "order", "value"), rows)
    return checks, {"report": data}


def cmd_bessel_table(cfg, out: Path, threshold):
    o = cfg.options
    K = o.get("K", 2)
    lambdas = o.get("lambdas", [10, 20, 40, 80])
    target = o.get("target", "bessel")
    if not isinstance(K, int) or K < 1:
        raise ConfigError(f"[options] K must be an integer >= 1, got {K!r}")
    if not isinstance(lambdas, list) or not lambdas or min(lambdas) < 10:
        raise ConfigError("[options] lambdas must be a nonempty list of values >= 10")
    if target == "bessel":
        nu = float(o.get("nu", 0.0))
        check = verify_bessel_expansion(nu, K, lambdas)
        exp = build_expansion(nu, K)
        ref = bessel_j(nu, np.array(lambdas, dtype=float))
        approx = expansion_eval(exp, np.array(lambdas, dtype=float))
        label = {"nu": nu}
    elif target == "sphere":
        if cfg.d < 2:
            raise ConfigError("target = sphere needs d >= 2")
        check = verify_fd_expansion(cfg.d, K, lambdas)
        ref = surface_fourier(cfg.d, np.array(lambdas, dtype=float))
        approx = fd_expansion_eval(cfg.d, K, np.array(lambdas, dtype=float))
        label = {"d": cfg.d}
    else:
        raise ConfigError(f"[options] target must be bessel or sphere, got {target!r}")
    ref, approx = np.atleast_1d(ref), np.atleast_1d(approx)
    rows = [(lam, r, a, r - a, amp, sc) for lam, r, a, amp, sc
            in zip(check.lambdas, ref, approx, check.errors, check.scaled_errors)]
    _write_csv(out / "bessel_table.csv",
               ("lambda", "reference", "expansion", "error", "amplitude", "scaled_amplitude"), rows)
    tol = 0.15 if threshold is None else threshold
    passed = abs(check.fitted_decay - check.predicted_decay) <= tol if len(lambdas) >= 2 else True
    metrics = {**label, "K": K, "fitted_decay": check.fitted_decay,
               "predicted_decay": check.predicted_decay, "max_scaled_error": check.max_scaled_error,
               "tolerance": tol}
    return [_check("expansion_decay", passed, metrics)], {}


def cmd_kernel_norm(cfg, out: Path, threshold):
    sym = build_symbol(cfg.symbol)
    cutoff = CutoffSpec(float(cfg.options.get("eps0", sym.eps0)))
    r_max = cfg.options.get("r_max")
    res = verify_kernel_bound(sym, cfg.d, cutoff, r_max=r_max)
    prof = kernel_profile(sym, cfg.d, cutoff, r_max)
    rows = zip(prof.r_grid, prof.values, prof.shell_contribution(), prof.cumulative_l1)
    _write_csv(out / "kernel_profile.csv", ("r", "beta1", "shell_contribution", "cumulative_l1"), rows)
    metrics = {"l1": res.l1, "rhs": res.rhs, "ratio": res.ratio, "converged": res.converged,
               "l1_refined": res.l1_refined, "relative_change": res.relative_change,
               "tail_ratio": prof.tail_ratio, "quadrature_ok": bool(np.all(prof.quadrature_ok))}
    wit = [{"tag": "b:divergent", "order": j} for j in res.divergent_terms]
    if res.contradiction:
        wit.append({"tag": "kernel:red_flag", "detail": "rhs finite but L1 estimate not converged"})
    return [_check("kernel_bound", res.passed, metrics, wit)], {}


def cmd_residual(cfg, out: Path, threshold):
    sym = build_symbol(cfg.symbol)
    gf = _grid_function(cfg)
    rep = helmholtz_residual(sym, gf)
    tol = 1e-11 if threshold is None else threshold
    rows = [("helmholtz", rep)]
    checks = [_check("helmholtz_residual", rep.relative_l2 <= tol,
                     {**rep.to_dict(), "observed": rep.relative_l2, "threshold": tol})]
    j0 = cfg.options.get("j0")
    if j0 is not None:
        poly = polyharmonic_residual(gf, int(j0))
        rows.append((f"polyharmonic_j0={j0}", poly))
        checks.append(_check("polyharmonic_residual", poly.relative_l2 <= tol,
                             {**poly.to_dict(), "observed": poly.relative_l2, "threshold": tol}))
    write_residual_csv(rows, out / "residual.csv")
    return checks, {}


def cmd_localize(cfg, out: Path, threshold):
    sym = build_symbol(cfg.symbol)
    o = cfg.options
    tol = 1e-11 if threshold is None else threshold
    worst = run_forward_check(sym, cfg.d, int(o.get("n_modes", 8)), cfg.seed,
                              int(o.get("box_multiple", 1)))
    checks = [_check("forward", worst <= tol, {"max_relative_residual": worst, "threshold": tol})]
    rows = [("forward_max_relative_residual", worst)]
    if "u" in o or "grid" in o:
        gf = _grid_function(cfg)
        delta = float(o.get("delta", 0.1))
        prof = spectral_support_profile(gf, delta)
        rows += [(k, v) for k, v in prof.to_dict().items()]
        try:
            res = run_contrapositive_check(sym, gf, delta)
            checks.append(_check("contrapositive", res.passed and res.lower_bound > 0,
                                 {"lower_bound": res.lower_bound, "observed": res.observed},
                                 [] if res.lower_bound > 0 else [{"tag": "c:zero_bound"}]))
        except ValueError as exc:
            checks.append(_check("contrapositive", False, {}, [{"tag": "precondition", "detail": str(exc)}]))
        checks.append(_check("support_profile", True, prof.to_dict()))
    _write_csv(out / "localize.csv", ("quantity", "value"), rows)
    return checks, {}


def cmd_j0_check(cfg, out: Path, threshold):
    sym = build_symbol(cfg.symbol)
    res = run_j0_check(sym, cfg.d)
    window = float(cfg.options.get("window", 0.2))
    prof = quotient_profile(sym, res.j0, window, int(cfg.options.get("n_points", 201)))
    _write_csv(out / "quotient.csv", ("t", "q"), zip(prof.t, prof.values))
    metrics = {"j0": res.j0, "quotient_bounded": res.quotient_bounded,
               "scaling_exponent": res.scaling_exponent, "limit_at_one": prof.limit_at_one,
               "expected_limit": prof.expected_limit, "limit_relative_error": prof.limit_error,
               "max_abs": prof.max_abs, "polyharmonic_relative": res.polyharmonic_relative}
    passed = (res.quotient_bounded and abs(res.scaling_exponent - res.j0) <= 0.05
              and prof.limit_error <= 1e-5)
    return [_check("j0", passed, metrics)], {}


def cmd_bernstein_verify(cfg, out: Path, threshold):
    bs = _bernstein_from(cfg.symbol)
    lam = np.geomspace(1e-3, 1e3, int(cfg.options.get("n_lambda", 61)))
    bound = verify_derivative_bound(bs, lam)
    # derivative identity against central differences
    h = 1e-5 * lam
    fd = (bernstein_eval(bs, lam + h) - bernstein_eval(bs, lam - h)) / (2 * h)
    exact = bernstein_derivative(bs, lam)
    fd_err = float(np.max(np.abs(fd - exact) / np.abs(exact)))
    rows = [(x, bernstein_eval(bs, x), e, x * e) for x, e in zip(lam, exact)]
    _write_csv(out / "bernstein.csv", ("lambda", "phi", "dphi", "lambda_dphi"), rows)
    checks = [
        _check("derivative_identity", fd_err <= 1e-8, {"max_relative_error": fd_err}),
        _check("derivative_bound", bound.passed,
               {"max_ratio": bound.max_ratio, "violations": bound.violations}),
    ]
    n1, n2 = verify_nondegeneracy(bs)
    checks.append(_check("nondegeneracy", n1 and n2, {"phi1_nonzero": n1, "dphi1_nonzero": n2}))
    if bs.c1 == 0:
        rep = full_condition_report(as_symbol(bs), cfg.d, "strict_c")
        checks.append(_check("conditions", rep.passed,
                             {"singularity_terms": rep.singularity_terms, "j0": rep.j0},
                             rep.to_dict()["failure_witnesses"]))
    else:
        checks.append(_check("conditions", False, {},
                             [{"tag": "b", "detail": "c1 > 0 gives Phi(0) != 0"}]))
    return checks, {}


_DISPATCH = {
    "check-symbol": cmd_check_symbol,
    "bessel-table": cmd_bessel_table,
    "kernel-norm": cmd_kernel_norm,
    "residual": cmd_residual,
    "localize": cmd_localize,
    "j0-check": cmd_j0_check,
    "bernstein-verify": cmd_bernstein_verify,
}


def run_experiment(cfg: ExperimentConfig, out_dir, threshold: Optional[float] = None) -> int:
    """Run one experiment, write summary.json plus CSV detail; return the exit status."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        checks, extra = _DISPATCH[cfg.command](cfg, out, threshold)
    except ConfigError:
        raise
    except (ValueError, ArithmeticError) as exc:
        checks, extra = [_check(cfg.command, False, {}, [{"tag": "error", "detail": str(exc)}])], {}
    passed = all(c["pass"] for c in checks)
    summary = {
        "tool": "helmloc",
        "version": __version__,
        "config": cfg.echo(),
        "seed": cfg.seed,
        "threshold": threshold,
        "checks": checks,
        "pass": passed,
        **extra,
    }
    text = json.dumps(_clean(summary), sort_keys=True, indent=2, allow_nan=False)
    (out / "summary.json").write_text(text + "\n")
    return EXIT_PASS if passed else EXIT_FAIL


def _run_one(path: str, out_dir: str, seed: Optional[int], threshold: Optional[float]):
    try:
        cfg = load_config(path)
        if seed is not None:
            cfg.seed = seed
        return path, cfg.command, run_experiment(cfg, out_dir, threshold), ""
    except ConfigError as exc:
        return path, "", EXIT_CONFIG, str(exc)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="helmloc", description="Run a Helmholtz-localization experiment.")
    p.add_argument("--config", required=True, help="config file, or a directory of *.ini configs")
    p.add_argument("--out", default="helmloc-out", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers in batch mode")
    p.add_argument("--threshold", type=float, default=None, help="pass threshold for residual-type checks")
    p.add_argument("--version", action="version", version=f"helmloc {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg_path = Path(args.config)
    out = Path(args.out)
    if cfg_path.is_dir():
        paths = sorted(str(p) for p in cfg_path.glob("*.ini"))
        if not paths:
            print(f"error: no *.ini configs in {cfg_path}", file=sys.stderr)
            return EXIT_CONFIG
        jobs = [(p, str(out / Path(p).stem), args.seed, args.threshold) for p in paths]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_run_one, *zip(*jobs)))
        else:
            results = [_run_one(*j) for j in jobs]
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "batch_summary.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("config", "command", "status", "message"))
            for path, command, status, msg in results:
                w.writerow((os.path.basename(path), command, status, msg))
                if msg:
                    print(f"error: {msg}", file=sys.stderr)
        return max(r[2] for r in results)
    _, command, status, msg = _run_one(str(cfg_path), str(out), args.seed, args.threshold)
    if msg:
        print(f"error: {msg}", file=sys.stderr)
    else:
        print(f"{command}: {'pass' if status == EXIT_PASS else 'FAIL'} -> {out / 'summary.json'}")
    return status


if __name__ == "__main__":
    sys.exit(main())
