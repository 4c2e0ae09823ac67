"""Command-line front end.

Experiments are described by an INI-style file with flat sections::

    [experiment]
    case = contact          ; contact | shock | sod | custom
    strength = 8            ; T2/T1 (contact) or Ma1 (shock)
    sample_times = 0.25, 0.5, 1

    [dsmc]
    replicas = 4

Every key has a default except ``case`` and, for contact and shock cases,
``strength``.  Values spelled ``auto`` are resolved from the case.  The fully
resolved file is written next to the outputs and reproduces the run when
passed back through ``--config``.

Exit status: 0 success, 1 configuration error, 2 numerical error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import platform
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import diagnostics as dg
from . import dsmc, freemol, fvm, riemann
from .fluxes import GksParams
from .gas import ARGON, GasModel, GasState, PositivityError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

CASES = ("contact", "shock", "sod", "custom")
REGIMES = ("freemol", "dsmc", "fvm", "riemann")
PROFILE_COLUMNS = ("x_over_lambda1", "rho", "rho_star", "U", "Tn", "Tx", "Ttot")
DIAG_COLUMNS = ("t_over_tau1", "thickness", "overshoot", "undershoot", "Tx_minus_Tn_max")

# standard Sod problem in units with R = 1
SOD_LEFT = GasState(1.0, 0.0, 1.0)
SOD_RIGHT = GasState(0.125, 0.0, 0.1 / 0.125)


class ConfigError(ValueError):
    pass


# section -> key -> (type, default).  A default of None marks a required key.
SCHEMA = {
    "experiment": {
        "case": (CASES, None),
        "regime": (REGIMES + ("auto",), "auto"),
        "strength": ("float", "auto"),
        "strength_kind": (("auto", "temperature_ratio", "mach"), "auto"),
        "sample_times": ("floats", "auto"),
        "seed": ("int", "0"),
        "output": ("str", "out"),
        "rho1": ("float", "1.0"),
        "T1": ("float", "273.0"),
    },
    "gas": {
        "preset": (("auto", "argon", "continuum"), "auto"),
        "R": ("float", "auto"),
        "gamma": ("float", "auto"),
        "m": ("float", "auto"),
        "d_ref": ("float", "auto"),
        "T_ref": ("float", "auto"),
        "omega": ("float", "auto"),
        "mu_ref": ("float", "auto"),
    },
    "freemol": {
        "points": ("int", "801"),
        "half_length": ("float", "auto"),
    },
    "dsmc": {
        "half_length": ("float", "50.0"),
        "cells_per_lambda": ("float", "3.0"),
        "particles_per_cell": ("float", "100.0"),
        "dt": ("float", "0.1"),
        "replicas": ("int", "1"),
        "collisions": ("bool", "true"),
        "bin_cells": ("int", "1"),
        "debug": ("bool", "false"),
    },
    "fvm": {
        "N": ("int", "400"),
        "x_min": ("float", "auto"),
        "x_max": ("float", "auto"),
        "x0": ("float", "auto"),
        "flux": (fvm.FLUXES, "godunov"),
        "limiter": (fvm.LIMITERS, "none"),
        "cfl": ("float", "0.5"),
        "bc": (("auto", "zero-gradient", "fixed"), "auto"),
    },
    "riemann": {
        "points": ("int", "401"),
    },
    "gks": {
        "C_jump": ("float", "1.0"),
    },
    "custom": {
        "rho_left": ("float", "1.0"),
        "u_left": ("float", "0.0"),
        "T_left": ("float", "273.0"),
        "rho_right": ("float", "0.125"),
        "u_right": ("float", "0.0"),
        "T_right": ("float", "273.0"),
    },
}


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

def _key_lines(text: str) -> dict:
    """(section, key) -> 1-based line number, found by scanning the raw text."""
    lines = {}
    section = None
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            lines.setdefault((section, None), no)
            continue
        m = re.match(r"^([^=:;#\s][^=:]*?)\s*[=:]", s)
        if m and section is not None:
            lines.setdefault((section, m.group(1).strip()), no)
    return lines


def _convert(kind, raw: str, where: str):
    raw = raw.strip()
    if raw == "auto" and kind != "str":
        return "auto"
    try:
        if kind == "float":
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "str":
            return raw
    except ValueError:
        raise ConfigError(f"{where}: cannot read {raw!r} as {kind}") from None
    # tuple of allowed words
    if raw not in kind:
        raise ConfigError(f"{where}: {raw!r} is not one of {', '.join(kind)}")
    return raw


@dataclass
class ExperimentConfig:
    """Parsed configuration; ``values`` holds every key, with ``auto`` unresolved."""

    values: dict

    def __getitem__(self, path: str):
        sec, key = path.split(".")
        return self.values[sec][key]


def parse_config(text: str, overrides: dict | None = None, regime: str | None = None) -> ExperimentConfig:
    """Parse config text, fill defaults and resolve ``auto`` entries.

    ``overrides`` maps "section.key" to raw strings applied after the file;
    ``regime`` is the subcommand and must agree with ``experiment.regime``.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"),
                                   delimiters=("=",), strict=True)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    where = _key_lines(text)
    raw = {sec: {} for sec in SCHEMA}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}] (line {where.get((sec, None), '?')})")
        for key, val in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {sec}.{key} (line {where.get((sec, key), '?')})")
            raw[sec][key] = (val, f"{sec}.{key} (line {where.get((sec, key), '?')})")
    for path, val in (overrides or {}).items():
        sec, _, key = path.partition(".")
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            raise ConfigError(f"unknown key {path} (command line)")
        raw[sec][key] = (val, f"{path} (command line)")

    values = {}
    for sec, keys in SCHEMA.items():
        values[sec] = {}
        for key, (kind, default) in keys.items():
            if key in raw[sec]:
                val, loc = raw[sec][key]
            elif default is None:
                raise ConfigError(f"missing required key {sec}.{key}")
            else:
                val, loc = default, f"{sec}.{key} (default)"
            values[sec][key] = _convert(kind, val, loc)

    exp = values["experiment"]
    if regime is not None:
        if exp["regime"] not in ("auto", regime):
            raise ConfigError(f"experiment.regime = {exp['regime']} conflicts with subcommand {regime}")
        exp["regime"] = regime
    if exp["regime"] == "auto":
        raise ConfigError("experiment.regime not set and no subcommand given")
    _resolve(values)
    return ExperimentConfig(values)


def _resolve(v: dict) -> None:
    """Replace ``auto`` entries by concrete values and validate cross-key rules."""
    exp = v["experiment"]
    case, regime = exp["case"], exp["regime"]

    if case in ("contact", "shock"):
        if exp["strength"] == "auto":
            raise ConfigError(f"missing required key experiment.strength for a {case} case")
    elif exp["strength"] == "auto":
        exp["strength"] = 0.0
    kind = exp["strength_kind"]
    if kind == "auto":
        kind = {"contact": "temperature_ratio", "shock": "mach"}.get(case, "temperature_ratio")
    exp["strength_kind"] = kind
    if case == "contact":
        if kind != "temperature_ratio":
            raise ConfigError("experiment.strength_kind for a contact must be temperature_ratio")
        if not exp["strength"] > 0:
            raise ConfigError("experiment.strength: contact temperature ratio must be positive")
    if case == "shock":
        if kind == "mach" and not exp["strength"] > 1:
            raise ConfigError(f"experiment.strength = {exp['strength']}: shock needs Ma1 > 1")
        if kind == "temperature_ratio" and not exp["strength"] > 1:
            raise ConfigError(f"experiment.strength = {exp['strength']}: shock needs T2/T1 > 1")
    if case == "sod" and regime in ("freemol", "dsmc"):
        raise ConfigError(f"case sod is a continuum problem; regime {regime} is not available")

    gas = v["gas"]
    if gas["preset"] == "auto":
        gas["preset"] = "continuum" if case == "sod" else "argon"
    base = GasModel.continuum() if gas["preset"] == "continuum" else ARGON
    for key in ("R", "gamma", "m", "d_ref", "T_ref", "omega", "mu_ref"):
        if gas[key] == "auto":
            gas[key] = None if key == "mu_ref" and gas["preset"] == "argon" else getattr(base, key)
    try:
        gm = GasModel(**{k: gas[k] for k in ("R", "gamma", "m", "d_ref", "T_ref", "omega", "mu_ref")})
    except ValueError as exc:
        raise ConfigError(f"[gas]: {exc}") from None
    gas["mu_ref"] = gm.mu_ref

    if exp["sample_times"] == "auto":
        exp["sample_times"] = (0.2,) if case == "sod" else (1.0,)
    times = exp["sample_times"]
    if not times:
        raise ConfigError("experiment.sample_times is empty")
    if any(t < 0 for t in times) or list(times) != sorted(times):
        raise ConfigError("experiment.sample_times must be non-negative and increasing")
    if regime in ("freemol", "riemann") and any(t <= 0 for t in times):
        raise ConfigError(f"experiment.sample_times must be positive for regime {regime}")

    fv = v["fvm"]
    continuum_units = case == "sod"
    if fv["x_min"] == "auto":
        fv["x_min"] = 0.0 if continuum_units else -50.0
    if fv["x_max"] == "auto":
        fv["x_max"] = 1.0 if continuum_units else 50.0
    if fv["x0"] == "auto":
        fv["x0"] = 0.5 * (fv["x_min"] + fv["x_max"])
    if fv["bc"] == "auto":
        fv["bc"] = "fixed" if case == "shock" else "zero-gradient"
    if not fv["x_max"] > fv["x_min"]:
        raise ConfigError("fvm.x_max must exceed fvm.x_min")
    if v["freemol"]["points"] < 3 or v["riemann"]["points"] < 3:
        raise ConfigError("points must be at least 3")
    # run-time objects are built once here so bad values fail as config errors
    try:
        _build(v, gm)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _build(v: dict, gm: GasModel):
    """Initial condition, gas model and unit scales for a resolved config."""
    exp = v["experiment"]
    case = exp["case"]
    if case == "contact":
        ic = freemol.contact_ic(exp["strength"], exp["rho1"], exp["T1"])
    elif case == "shock":
        Ma = exp["strength"]
        if exp["strength_kind"] == "temperature_ratio":
            Ma = riemann.mach_from_temperature_ratio(Ma, gm.gamma)
        ic = freemol.shock_ic(Ma, exp["rho1"], exp["T1"], gm)
    elif case == "sod":
        ic = freemol.DiscontinuityIC(SOD_LEFT, SOD_RIGHT)
    else:
        c = v["custom"]
        left = GasState(c["rho_left"], c["u_left"], c["T_left"]).validate()
        right = GasState(c["rho_right"], c["u_right"], c["T_right"]).validate()
        ic = freemol.DiscontinuityIC(left, right)
    if case == "sod":
        lam, tau = 1.0, 1.0
    else:
        lam, tau = freemol.reference_scales(ic.left, gm)
    if exp["regime"] == "dsmc":
        d = v["dsmc"]
        dsmc.DsmcConfig(ic, d["half_length"], d["cells_per_lambda"], d["particles_per_cell"], d["dt"],
                        d["replicas"], tuple(exp["sample_times"]), exp["seed"], d["collisions"], d["debug"])
    if exp["regime"] == "fvm":
        f = v["fvm"]
        fvm.SchemeConfig(f["flux"], f["limiter"], f["cfl"], GksParams(v["gks"]["C_jump"]))
        if f["N"] < 4:
            raise ValueError("fvm.N must be at least 4")
    return ic, lam, tau


def gas_model(cfg: ExperimentConfig) -> GasModel:
    g = cfg.values["gas"]
    return GasModel(**{k: g[k] for k in ("R", "gamma", "m", "d_ref", "T_ref", "omega", "mu_ref")})


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def dump_config(cfg: ExperimentConfig) -> str:
    """Resolved config as text; parsing it back yields the same values."""
    out = []
    for sec, keys in cfg.values.items():
        out.append(f"[{sec}]")
        out.extend(f"{k} = {_fmt(val)}" for k, val in keys.items())
        out.append("")
    return "\n".join(out)


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------

def _freemol_profiles(cfg, ic, gm, lam, tau):
    fm = cfg.values["freemol"]
    out = []
    # fastest signal relative to the lambda1/tau1 unit speed
    speed = max(abs(s.u) + 5.0 * math.sqrt(2.0 * gm.R * s.T) for s in (ic.left, ic.right))
    speed /= lam / tau
    for t in cfg["experiment.sample_times"]:
        X = fm["half_length"] if fm["half_length"] != "auto" else speed * t
        x = np.linspace(-X, X, fm["points"])
        p = freemol.profile(ic, x * lam, t * tau, gm)
        out.append(dg.Profile(x, p.rho, p.U, p.Tn, p.Tx, t))
    return out


def _riemann_profiles(cfg, ic, gm, lam, tau):
    f = cfg.values["fvm"]
    fan = riemann.exact_riemann(ic.left, ic.right, gm)
    x = np.linspace(f["x_min"], f["x_max"], cfg["riemann.points"])
    out = []
    for t in cfg["experiment.sample_times"]:
        s = fan.sample((x - f["x0"]) * lam / (t * tau))
        out.append(dg.Profile(x, s.rho, s.u, s.T, s.T, t, "riemann"))
    return out


def _fvm_profiles(cfg, ic, gm, lam, tau):
    f = cfg.values["fvm"]
    scheme = fvm.SchemeConfig(f["flux"], f["limiter"], f["cfl"], GksParams(cfg["gks.C_jump"]))
    grid = fvm.riemann_grid(ic.left, ic.right, f["N"], f["x_min"] * lam, f["x_max"] * lam, gm,
                            x0=f["x0"] * lam, bc=f["bc"])
    times = [t * tau for t in cfg["experiment.sample_times"]]
    profs = fvm.run(grid, scheme, times[-1], gm, sample_times=times, x_scale=lam, t_scale=tau,
                    x_unit="lambda1", t_unit="tau1")
    for p, t in zip(profs, cfg["experiment.sample_times"]):
        p.t = t
    return profs


def _dsmc_profiles(cfg, ic, gm, lam, tau, threads):
    d = cfg.values["dsmc"]
    exp = cfg.values["experiment"]
    dc = dsmc.DsmcConfig(ic, d["half_length"], d["cells_per_lambda"], d["particles_per_cell"], d["dt"],
                         d["replicas"], tuple(exp["sample_times"]), exp["seed"], d["collisions"], d["debug"])
    sps = dsmc.run_unsteady(dc, gm, threads=threads, bin_cells=d["bin_cells"])
    return [sp.profile for sp in sps]


def profiles_for(cfg: ExperimentConfig, threads: int = 1) -> list:
    gm = gas_model(cfg)
    ic, lam, tau = _build(cfg.values, gm)
    regime = cfg["experiment.regime"]
    if regime == "freemol":
        return _freemol_profiles(cfg, ic, gm, lam, tau)
    if regime == "riemann":
        return _riemann_profiles(cfg, ic, gm, lam, tau)
    if regime == "fvm":
        return _fvm_profiles(cfg, ic, gm, lam, tau)
    return _dsmc_profiles(cfg, ic, gm, lam, tau, threads)


def _warn(msg: str) -> None:
    print(f"kinjump: {msg}", file=sys.stderr)


def _rho_star(p: dg.Profile) -> np.ndarray:
    try:
        return dg.normalized_density(p)
    except dg.DiagnosticError:
        return np.full(p.x.size, np.nan)


def diagnostics_row(p: dg.Profile) -> list:
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", dg.UnderResolvedWarning)
        try:
            d = dg.thickness(p)
        except dg.DiagnosticError as exc:
            _warn(f"t = {p.t!r}: thickness undefined ({exc})")
            d = math.nan
    try:
        o = dg.overshoot(p)
        over, under = o.max_over, o.max_under
    except dg.DiagnosticError:
        over = under = math.nan
    return [p.t, d, over, under, dg.anisotropy_max(p)]


def _savetxt(path: Path, columns, rows) -> None:
    np.savetxt(path, np.asarray(rows, dtype=float).reshape(-1, len(columns)), fmt="%.17g",
               delimiter=",", header=",".join(columns), comments="")


def write_profile(path: Path, p: dg.Profile) -> None:
    cols = np.column_stack([p.x, p.rho, _rho_star(p), p.U, p.Tn, p.Tx, p.Ttot])
    _savetxt(path, PROFILE_COLUMNS, cols)


def read_profile(path: Path, t: float) -> dg.Profile:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if tuple(header) != PROFILE_COLUMNS:
        raise ConfigError(f"{path}: unexpected header {header}")
    a = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return dg.Profile(a[:, 0], a[:, 1], a[:, 3], a[:, 4], a[:, 5], t, Ttot=a[:, 6])


def _versions() -> dict:
    import numba
    import scipy

    return {"kinjump": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": numba.__version__}


def run_case(cfg: ExperimentConfig, out: Path, threads: int = 1) -> int:
    """Run a resolved config and write profiles, diagnostics and manifest to ``out``."""
    t0 = time.perf_counter()
    profiles = profiles_for(cfg, threads)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, p in enumerate(profiles):
        name = f"profile_{i:03d}.csv"
        write_profile(out / name, p)
        entries.append({"file": name, "t_over_tau1": p.t})
    _savetxt(out / "diagnostics.csv", DIAG_COLUMNS, [diagnostics_row(p) for p in profiles])
    (out / "config.ini").write_text(dump_config(cfg))
    manifest = {
        "config": {s: {k: _fmt(v) for k, v in keys.items()} for s, keys in cfg.values.items()},
        "seed": cfg["experiment.seed"],
        "length_unit": "problem" if cfg["experiment.case"] == "sod" else "lambda1",
        "time_unit": "problem" if cfg["experiment.case"] == "sod" else "tau1",
        "profiles": entries,
        "diagnostics": "diagnostics.csv",
        "versions": _versions(),
        "threads": threads,
        "wall_time_s": time.perf_counter() - t0,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def run_diag(run_dir: Path, out: Path) -> int:
    """Recompute diagnostics.csv from the profile CSVs listed in a run manifest."""
    manifest = json.loads((run_dir / "manifest.json").read_text())
    profiles = [read_profile(run_dir / e["file"], float(e["t_over_tau1"])) for e in manifest["profiles"]]
    out.mkdir(parents=True, exist_ok=True)
    _savetxt(out / "diagnostics.csv", DIAG_COLUMNS, [diagnostics_row(p) for p in profiles])
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _warn(message)
        raise SystemExit(EXIT_CONFIG)


def _config_text(path: str | None) -> str:
    if path is None:
        return ""
    text = Path(path).read_text()
    if path.endswith(".json"):
        # a run manifest: re-run from its resolved config
        conf = json.loads(text)["config"]
        return "\n".join(f"[{s}]\n" + "\n".join(f"{k} = {v}" for k, v in keys.items())
                         for s, keys in conf.items())
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS,
                        help="experiment config (INI) or a previous run's manifest.json")
    common.add_argument("--seed", type=int, metavar="N", default=argparse.SUPPRESS,
                        help="override experiment.seed")
    common.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS,
                        help="output directory (overrides experiment.output)")
    common.add_argument("--threads", type=int, metavar="N", default=argparse.SUPPRESS,
                        help="worker threads for DSMC replicas; never changes results")
    common.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", default=argparse.SUPPRESS,
                        help="override one config key (repeatable)")
    p = _Parser(prog="kinjump", parents=[common],
                description="Free-molecular, DSMC and continuum runs of contact and shock jumps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("freemol", "closed-form free-molecular profiles"),
                        ("dsmc", "direct simulation Monte Carlo"),
                        ("fvm", "finite-volume Euler solver (godunov, kfvs, gks)"),
                        ("riemann", "exact Euler Riemann solution")):
        sub.add_parser(name, parents=[common], help=help_)
    d = sub.add_parser("diag", parents=[common], help="recompute diagnostics.csv from a run directory")
    d.add_argument("run_dir", help="directory holding manifest.json and profile CSVs")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = getattr(args, "threads", 1)
    if threads < 1:
        _warn("--threads must be at least 1")
        return EXIT_CONFIG
    try:
        if args.command == "diag":
            out = Path(getattr(args, "out", args.run_dir))
            return run_diag(Path(args.run_dir), out)
        overrides = {}
        for item in getattr(args, "set", None) or []:
            key, sep, val = item.partition("=")
            if not sep:
                raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
            overrides[key.strip()] = val
        if hasattr(args, "seed"):
            overrides["experiment.seed"] = str(args.seed)
        if hasattr(args, "out"):
            overrides["experiment.output"] = args.out
        cfg = parse_config(_config_text(getattr(args, "config", None)), overrides, args.command)
        return run_case(cfg, Path(cfg["experiment.output"]), threads)
    except ConfigError as exc:
        _warn(f"config error: {exc}")
        return EXIT_CONFIG
    except (PositivityError, riemann.VacuumError, FloatingPointError, RuntimeError) as exc:
        # RuntimeError covers non-convergence, quadrature and conservation failures
        _warn(f"numerical error: {exc}")
        return EXIT_NUMERICAL
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        _warn(f"I/O error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
