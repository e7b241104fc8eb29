"""Command-line front end: ``eval``, ``sweep``, ``compare`` and ``oracle``.

All inputs are dimensional (channel width ``a``, noise ``sigma``, angular
frequency ``omega``); every output row also reports ``omega_hat =
omega a**2 / sigma**2``.  Configuration comes from an INI file (sections
``[flow]``, ``[channel]``, ``[run]``, ``[sim]``) with command-line flags taking
precedence.  Exit status: 0 success, 1 runtime failure, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import configparser
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import closed_forms as cf
from .asymptotics import large_omega_dispersivity, small_omega_dispersivity
from .cell_solver import DEFAULT_GRID, numerical_dispersivity
from .domain import (
    ChannelConfig,
    DispersivityEstimate,
    FlowSpec,
    Harmonic,
    LinearShear,
    Method,
    Poiseuille,
    PowerLaw,
    Tabulated,
    VerticalDrift,
)
from .errors import DomainError, InputError, PreconditionError, UnsupportedError
from .sde import SimParams, estimate_dispersivity_mc, normality_check, simulate_paths

__all__ = ["RunConfig", "ConfigError", "load_config", "evaluate", "main"]

FLOW_KINDS = ("shear", "poiseuille", "powerlaw", "mixed", "tabulated")
METHODS = ("auto", "closed", "numeric", "small", "large", "mc")

SWEEP_HEADER = "omega,nu,D,D_over_D0,method,uncertainty"
EVAL_HEADER = "D,method,uncertainty,omega_hat"
COMPARE_HEADER = (
    "omega,omega_hat,closed,numeric,numeric_uncertainty,small,large,mc,mc_se,"
    "rel_closed_numeric,rel_closed_large,rel_numeric_large,rel_closed_mc,rel_numeric_mc"
)
PSI_HEADER = "psi,omega,omega_hat,D,uncertainty"
ORACLE_HEADER = (
    "omega,omega_hat,D,se,skewness,excess_kurtosis,ks_statistic,ks_pvalue,"
    "D_half_dt,se_half_dt,bias,bias_uncertainty,seed,n_particles,dt,T,burn_in"
)


class ConfigError(InputError):
    """A configuration value is missing, malformed or unsupported."""


@dataclass(frozen=True)
class RunConfig:
    kind: str = "shear"
    n: float = 2.0
    amplitude: float = 1.0
    u1: float = 1.0
    u2: float = 1.0
    psi: float = 0.0
    nodes: tuple = ()
    values: tuple = ()
    width: float = 1.0
    sigma: float = 1.0
    drift: str = "zero"
    drift_value: float = 0.0
    method: str = "auto"
    omegas: tuple = (1.0,)
    grid: int = DEFAULT_GRID
    threads: int = 0
    sim: SimParams = field(default_factory=SimParams)
    bias_check: bool = True
    include_mc: bool = False
    psi_count: int = 0
    out: str = "-"

    def __post_init__(self):
        if self.kind not in FLOW_KINDS:
            raise ConfigError(f"[flow] kind: unknown flow kind {self.kind!r}; "
                              f"expected one of {', '.join(FLOW_KINDS)}")
        if self.method not in METHODS:
            raise ConfigError(f"[run] method: unknown method {self.method!r}; "
                              f"expected one of {', '.join(METHODS)}")
        if not self.omegas:
            raise ConfigError("[run] omega: at least one frequency is required")
        if any(not (math.isfinite(w) and w >= 0) for w in self.omegas):
            raise ConfigError("[run] omega: frequencies must be finite and >= 0")
        if self.grid < 32:
            raise ConfigError(f"[run] grid: need at least 32 intervals, got {self.grid}")
        if self.drift not in ("zero", "constant"):
            raise ConfigError(f"[channel] drift: expected zero or constant, got {self.drift!r}")

    def channel(self) -> ChannelConfig:
        drift = VerticalDrift.zero()
        if self.drift == "constant" and self.drift_value != 0:
            drift = VerticalDrift.constant(self.drift_value)
        return ChannelConfig(self.width, self.sigma, drift)

    def flow(self, omega: float, psi: float | None = None) -> FlowSpec:
        psi = self.psi if psi is None else psi
        if self.kind == "shear":
            return FlowSpec.single(LinearShear(), omega, self.amplitude)
        if self.kind == "poiseuille":
            return FlowSpec.single(Poiseuille(), omega, self.amplitude)
        if self.kind == "powerlaw":
            return FlowSpec.single(PowerLaw(self.n), omega, self.amplitude)
        if self.kind == "mixed":
            return FlowSpec((Harmonic(self.u1, omega, LinearShear()),
                             Harmonic(self.u2, omega, Poiseuille(), psi)))
        return FlowSpec.single(Tabulated(np.array(self.nodes), np.array(self.values)),
                               omega, self.amplitude)

    def omega_hat(self, omega: float) -> float:
        return omega * self.width**2 / self.sigma**2


# ---------------------------------------------------------------------------
# configuration


def _parse_float(text, where):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {text!r}") from None


def _parse_int(text, where):
    try:
        return int(str(text).strip())
    except (TypeError, ValueError):
        pass
    try:
        value = float(text)
        if value.is_integer():
            return int(value)
    except (TypeError, ValueError, OverflowError):
        pass
    raise ConfigError(f"{where}: expected an integer, got {text!r}")


def _parse_list(text, where):
    return tuple(_parse_float(t, where) for t in str(text).replace(";", ",").split(",") if t.strip())


def parse_omega_range(text: str, where: str = "--omega-range") -> tuple:
    """``min:max:count`` to ``count`` log-spaced frequencies."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"{where}: expected min:max:count, got {text!r}")
    lo, hi = _parse_float(parts[0], where), _parse_float(parts[1], where)
    count = _parse_int(parts[2], where)
    if count < 1:
        raise ConfigError(f"{where}: count must be >= 1")
    if not (lo > 0 and hi > 0):
        raise ConfigError(f"{where}: log-spaced range needs min > 0 and max > 0")
    if count == 1:
        return (lo,)
    if hi < lo:
        raise ConfigError(f"{where}: max must be >= min")
    return tuple(float(w) for w in np.logspace(math.log10(lo), math.log10(hi), count))


def _bool(text, where):
    t = str(text).strip().lower()
    if t in ("1", "yes", "true", "on"):
        return True
    if t in ("0", "no", "false", "off"):
        return False
    raise ConfigError(f"{where}: expected yes/no, got {text!r}")


_KEYS = {
    "flow": {"kind", "n", "amplitude", "u1", "u2", "psi", "nodes", "values"},
    "channel": {"width", "a", "sigma", "drift", "drift_value"},
    "run": {"method", "omega", "omega_range", "grid", "threads", "psi_count", "mc"},
    "sim": {"dt", "t", "particles", "n_particles", "burn_in", "seed", "bias_check"},
}


def _from_ini(text: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config file: {exc}") from None
    out = {}
    for section in parser.sections():
        if section not in _KEYS:
            raise ConfigError(f"config file: unknown section [{section}]")
        for key, value in parser.items(section):
            if key not in _KEYS[section]:
                raise ConfigError(f"[{section}] {key}: unknown key")
            out[(section, key)] = value
    return out


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge the INI file (if any) with command-line overrides."""
    raw = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = _from_ini(fh.read())
        except OSError as exc:
            raise ConfigError(f"--config: cannot read {args.config!r}: {exc.strerror}") from None

    def get(section, key, default=None):
        return raw.get((section, key), default)

    kw = {}
    kind = args.flow or get("flow", "kind")
    if kind is not None:
        kw["kind"] = kind.strip().lower()
    n = args.n if args.n is not None else get("flow", "n")
    if n is not None:
        kw["n"] = _parse_float(n, "[flow] n")
    for key in ("amplitude", "u1", "u2", "psi"):
        if get("flow", key) is not None:
            kw[key] = _parse_float(get("flow", key), f"[flow] {key}")
    if get("flow", "nodes") is not None:
        kw["nodes"] = _parse_list(get("flow", "nodes"), "[flow] nodes")
        kw["values"] = _parse_list(get("flow", "values", ""), "[flow] values")

    width = get("channel", "width", get("channel", "a"))
    if width is not None:
        kw["width"] = _parse_float(width, "[channel] width")
    if get("channel", "sigma") is not None:
        kw["sigma"] = _parse_float(get("channel", "sigma"), "[channel] sigma")
    if get("channel", "drift") is not None:
        kw["drift"] = get("channel", "drift").strip().lower()
    if get("channel", "drift_value") is not None:
        kw["drift_value"] = _parse_float(get("channel", "drift_value"), "[channel] drift_value")

    method = args.method or get("run", "method")
    if method is not None:
        kw["method"] = method.strip().lower()
    if args.omega is not None:
        kw["omegas"] = _parse_list(args.omega, "--omega")
    elif args.omega_range is not None:
        kw["omegas"] = parse_omega_range(args.omega_range)
    elif get("run", "omega") is not None:
        kw["omegas"] = _parse_list(get("run", "omega"), "[run] omega")
    elif get("run", "omega_range") is not None:
        kw["omegas"] = parse_omega_range(get("run", "omega_range"), "[run] omega_range")
    grid = args.grid if args.grid is not None else get("run", "grid")
    if grid is not None:
        kw["grid"] = _parse_int(grid, "--grid")
    threads = get("run", "threads", os.environ.get("OSCIDISP_THREADS"))
    if threads is not None and str(threads).strip():
        kw["threads"] = _parse_int(threads, "OSCIDISP_THREADS")
    psi_count = getattr(args, "psi_sweep", None) or get("run", "psi_count")
    if psi_count is not None:
        kw["psi_count"] = _parse_int(psi_count, "--psi-sweep")
    if getattr(args, "mc", False) or _bool(get("run", "mc", "no"), "[run] mc"):
        kw["include_mc"] = True

    sim = {}
    for key, name, parse in (("dt", "dt", _parse_float), ("t", "T", _parse_float),
                             ("burn_in", "burn_in", _parse_float), ("seed", "seed", _parse_int),
                             ("particles", "n_particles", _parse_int),
                             ("n_particles", "n_particles", _parse_int)):
        if get("sim", key) is not None:
            sim[name] = parse(get("sim", key), f"[sim] {key}")
    for flag, name, parse in (("seed", "seed", _parse_int), ("particles", "n_particles", _parse_int),
                              ("dt", "dt", _parse_float), ("horizon", "T", _parse_float)):
        if getattr(args, flag, None) is not None:
            sim[name] = parse(getattr(args, flag), f"--{flag}")
    try:
        kw["sim"] = SimParams(**sim)
    except InputError as exc:
        raise ConfigError(f"[sim]: {exc}") from None
    bias = _bool(get("sim", "bias_check", "yes"), "[sim] bias_check")
    kw["bias_check"] = bias and not getattr(args, "no_bias_check", False)
    if args.out is not None:
        kw["out"] = args.out
    run = RunConfig(**kw)
    _validate_flow(run)
    return run


def _validate_flow(run: RunConfig):
    try:
        run.channel()
        run.flow(1.0)
    except InputError as exc:
        section = "[channel]" if "width" in str(exc) or "sigma" in str(exc) or "drift" in str(exc) else "[flow]"
        raise ConfigError(f"{section}: {exc}") from None
    if run.kind == "powerlaw" and run.method == "closed":
        cf.power_law_kind(run.n)


# ---------------------------------------------------------------------------
# evaluation


def _closed_kind_value(run: RunConfig, omega_hat: float) -> float:
    if run.kind == "shear":
        return run.amplitude**2 * cf.d1(omega_hat)
    if run.kind == "poiseuille":
        return run.amplitude**2 * cf.d2(omega_hat)
    if run.kind == "powerlaw":
        return run.amplitude**2 * cf.power_law_closed_form(run.n, omega_hat)
    if run.kind == "mixed":
        return cf.combined_dispersivity(run.u1, run.u2, run.psi, omega_hat)
    raise UnsupportedError("no closed form for tabulated profiles; use method=numeric")


def closed_available(run: RunConfig) -> bool:
    if run.kind == "tabulated" or not run.channel().drift.is_zero:
        return False
    if run.kind == "powerlaw":
        try:
            cf.power_law_kind(run.n)
        except UnsupportedError:
            return False
    return True


def _closed(run: RunConfig, omega: float) -> DispersivityEstimate:
    if not run.channel().drift.is_zero:
        raise UnsupportedError("closed forms assume zero vertical drift; use method=numeric")
    w = run.omega_hat(omega)
    value = _closed_kind_value(run, w) * run.width**2 / run.sigma**2
    return DispersivityEstimate(value, Method.CLOSED_FORM, None, {"omega_hat": w})


def _large(run: RunConfig, omega: float) -> DispersivityEstimate:
    cfg = run.channel()
    if run.kind == "mixed":
        if not cfg.drift.is_zero:
            raise UnsupportedError("large-omega limit of the mixed flow needs zero drift")
        parts = [large_omega_dispersivity(h.profile, omega, cfg, h.amplitude)
                 for h in run.flow(omega).harmonics]
        return DispersivityEstimate(sum(p.value for p in parts), Method.ASYMPTOTIC_LARGE, None,
                                    parts[0].metadata)
    h = run.flow(omega).harmonics[0]
    return large_omega_dispersivity(h.profile, omega, cfg, h.amplitude)


def evaluate(run: RunConfig, omega: float, method: str | None = None) -> DispersivityEstimate:
    """Dimensional dispersivity of the configured flow at ``omega``."""
    method = method or run.method
    if method == "auto":
        method = "closed" if closed_available(run) else "numeric"
    if method == "closed":
        return _closed(run, omega)
    if method == "numeric":
        return numerical_dispersivity(run.channel(), run.flow(omega), run.grid)
    if method == "small":
        return small_omega_dispersivity(run.channel(), run.flow(omega), run.grid)
    if method == "large":
        return _large(run, omega)
    if method == "mc":
        ens = simulate_paths(run.channel(), run.flow(omega), run.sim)
        return estimate_dispersivity_mc(ens)
    raise ConfigError(f"[run] method: unknown method {method!r}")


def reference_value(run: RunConfig) -> float:
    """``D(0)``: the quasi-steady (period-averaged) limit of the configured flow."""
    return small_omega_dispersivity(run.channel(), run.flow(1.0), run.grid).value


# ---------------------------------------------------------------------------
# output


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.17g}"


def _row(values) -> str:
    return ",".join(fmt(v) for v in values) + "\n"


def _rel(a, b):
    if a is None or b is None:
        return None
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _workers(run: RunConfig) -> int:
    return run.threads if run.threads > 0 else (os.cpu_count() or 1)


def _map(run: RunConfig, fn, items):
    # results come back in input order whatever the completion order
    items = list(items)
    if _workers(run) == 1 or len(items) == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=_workers(run)) as pool:
        return list(pool.map(fn, items))


def _emit(run: RunConfig, text: str, stdout):
    if run.out in ("-", ""):
        stdout.write(text)
        return
    with open(run.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_eval(run: RunConfig, stdout=sys.stdout) -> int:
    omega = run.omegas[0]
    est = evaluate(run, omega)
    _emit(run, _row((est.value, est.method.value, est.uncertainty, run.omega_hat(omega))), stdout)
    return 0


def cmd_sweep(run: RunConfig, stdout=sys.stdout) -> int:
    omegas = sorted(run.omegas)
    d0 = reference_value(run)
    ests = _map(run, lambda w: evaluate(run, w), omegas)
    buf = io.StringIO()
    buf.write(SWEEP_HEADER + "\n")
    for w, est in zip(omegas, ests):
        ratio = est.value / d0 if d0 > 0 else None
        buf.write(_row((w, math.sqrt(run.omega_hat(w)), est.value, ratio,
                        est.method.value, est.uncertainty)))
    _emit(run, buf.getvalue(), stdout)
    return 0


def _compare_row(run: RunConfig, omega: float, small: float):
    closed = _closed(run, omega).value if closed_available(run) else None
    num = numerical_dispersivity(run.channel(), run.flow(omega), run.grid)
    large = _large(run, omega).value if omega > 0 else None
    mc = mc_se = None
    if run.include_mc:
        est = estimate_dispersivity_mc(simulate_paths(run.channel(), run.flow(omega), run.sim))
        mc, mc_se = est.value, est.uncertainty
    return (omega, run.omega_hat(omega), closed, num.value, num.uncertainty, small, large, mc, mc_se,
            _rel(closed, num.value), _rel(closed, large), _rel(num.value, large),
            _rel(closed, mc), _rel(num.value, mc))


def cmd_compare(run: RunConfig, stdout=sys.stdout, summary=sys.stderr) -> int:
    if run.psi_count:
        return _psi_sweep(run, stdout, summary)
    omegas = sorted(run.omegas)
    small = reference_value(run)
    rows = _map(run, lambda w: _compare_row(run, w, small), omegas)
    _emit(run, COMPARE_HEADER + "\n" + "".join(_row(r) for r in rows), stdout)
    diffs = [r[9] for r in rows if r[9] is not None]
    worst = max(diffs) if diffs else None
    summary.write(f"max_rel_closed_numeric={fmt(worst) or 'n/a'}\n")
    return 0


def _psi_sweep(run: RunConfig, stdout, summary) -> int:
    if run.kind != "mixed":
        raise ConfigError("--psi-sweep: phase sweeps need flow kind 'mixed'")
    omega = run.omegas[0]
    psis = [2 * math.pi * k / run.psi_count for k in range(run.psi_count)]
    ests = _map(run, lambda p: numerical_dispersivity(run.channel(), run.flow(omega, p), run.grid),
                psis)
    buf = io.StringIO()
    buf.write(PSI_HEADER + "\n")
    for p, est in zip(psis, ests):
        buf.write(_row((p, omega, run.omega_hat(omega), est.value, est.uncertainty)))
    _emit(run, buf.getvalue(), stdout)
    vals = np.array([e.value for e in ests])
    spread = float((vals.max() - vals.min()) / vals.mean()) if vals.mean() > 0 else 0.0
    summary.write(f"psi_spread={fmt(spread)}\n")
    return 0


def _oracle_row(run: RunConfig, omega: float):
    cfg, flow = run.channel(), run.flow(omega)
    ens = simulate_paths(cfg, flow, run.sim)
    est = estimate_dispersivity_mc(ens)
    norm = normality_check(ens) if ens.n_particles >= 1000 else None
    half = half_se = bias = bias_unc = None
    if run.bias_check:
        fine = estimate_dispersivity_mc(simulate_paths(cfg, flow, run.sim, substeps=2))
        half, half_se = fine.value, fine.uncertainty
        bias = est.value - fine.value
        bias_unc = math.hypot(est.uncertainty, fine.uncertainty)
    p = run.sim
    return (omega, run.omega_hat(omega), est.value, est.uncertainty,
            None if norm is None else norm.skewness,
            None if norm is None else norm.excess_kurtosis,
            None if norm is None else norm.ks_statistic,
            None if norm is None else norm.ks_pvalue,
            half, half_se, bias, bias_unc, p.seed, p.n_particles, p.dt, p.T, p.burn_in)


def cmd_oracle(run: RunConfig, stdout=sys.stdout) -> int:
    rows = [_oracle_row(run, w) for w in sorted(run.omegas)]
    _emit(run, ORACLE_HEADER + "\n" + "".join(_row(r) for r in rows), stdout)
    return 0


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "compare": cmd_compare, "oracle": cmd_oracle}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscidisp",
        description="Taylor dispersivity of oscillatory channel flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "eval": "one dispersivity value as a CSV row",
        "sweep": "frequency sweep with D/D0 (figure data)",
        "compare": "closed form vs numeric vs asymptotic (vs Monte Carlo)",
        "oracle": "Monte Carlo estimate with normality and dt-halving checks",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", help="INI file with [flow] [channel] [run] [sim] sections")
        p.add_argument("--flow", help=f"flow kind: {', '.join(FLOW_KINDS)}")
        p.add_argument("--n", help="power-law exponent")
        p.add_argument("--omega", help="angular frequency, or comma-separated list")
        p.add_argument("--omega-range", dest="omega_range", help="log-spaced min:max:count")
        p.add_argument("--method", help=f"one of {', '.join(METHODS)}")
        p.add_argument("--grid", help="solver intervals N (default 2048)")
        p.add_argument("--seed", help="Monte Carlo seed")
        p.add_argument("--particles", help="Monte Carlo particle count")
        p.add_argument("--dt", help="Monte Carlo time step")
        p.add_argument("--horizon", help="Monte Carlo horizon T")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        if name == "compare":
            p.add_argument("--mc", action="store_true", help="add a Monte Carlo column")
            p.add_argument("--psi-sweep", dest="psi_sweep", type=int,
                           help="mixed flow: numeric D at K equally spaced phases")
        if name == "oracle":
            p.add_argument("--no-bias-check", dest="no_bias_check", action="store_true",
                           help="skip the halved-step rerun")
    return parser


CONFIG_ERRORS = (ConfigError, InputError, DomainError, UnsupportedError, PreconditionError)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        run = load_config(args)
        if args.command == "compare":
            return cmd_compare(run, stdout, stderr)
        return COMMANDS[args.command](run, stdout)
    except CONFIG_ERRORS as exc:
        stderr.write(f"oscidisp: configuration error: {exc}\n")
        return 2
    except (OSError, ArithmeticError, RuntimeError) as exc:
        stderr.write(f"oscidisp: error: {exc}\n")
        return 1


def _entry():
    sys.exit(main())


if __name__ == "__main__":
    _entry()
