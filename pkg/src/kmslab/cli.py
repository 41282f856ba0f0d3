"""Command-line experiment runner.

    kmslab <command> [--config run.ini] [--a A] [--kappa K] [--alpha AL] [--p P]
                     [--emin X] [--emax X] [--points N] [--out DIR]

Commands: spectrum, response, temp-scan, thermality, plateau.  Each run
writes one CSV table, a ``manifest.json`` (always, also on failure) and
plot-data files holding x,y pairs.  The config file is INI; see README.md for
the schema.  A manifest can be passed back as ``--config`` to re-run it.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .response import (
    ln_response_infinite_time_limit,
    response_frequency,
)
from .spectral import QuadratureError, EnvelopeFitError, decay_envelope_fit, fourier_transform
from .switching import (
    InvalidParameterError,
    Rescaled,
    SwitchingFunction,
    bump_product_switch,
    plateau_switch,
)
from .thermality import (
    ScalingSchedule,
    UndefinedTemperatureError,
    plateau_scan,
    temperature_estimate,
    thermality_scan,
)

COMMANDS = ("spectrum", "response", "temp-scan", "thermality", "plateau")

THERMALITY_COLUMNS = (
    "E", "lambda", "ln_F_minus", "ln_F_plus", "inv_T_est", "deviation", "B_minus", "B_plus", "noise",
)
SCHEMAS = {
    "spectrum": ("omega", "abs_chi_hat", "ln_abs_chi_hat", "ln_envelope", "abs_error"),
    "response": ("E", "lambda", "ln_F", "abs_error_ln", "ln_F_limit", "ln_ratio"),
    "temp-scan": ("E", "lambda", "ln_F_minus", "ln_F_plus", "inv_T_est", "T_est", "deviation", "noise"),
    "thermality": THERMALITY_COLUMNS,
    "plateau": THERMALITY_COLUMNS,
}

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Invalid configuration; the message names the offending field."""


# --------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    command: str = "thermality"
    # switching
    kind: str = "bump_product"
    kappa: float = 1.0
    ramp: float = 1.0
    flat: float = 1.0
    scale: float = 1.0
    # physics
    a: float = 1.0
    # schedule
    alpha: float = math.pi
    p: float = 2.0
    fixed_lambda: float | None = None
    degree: int = 2
    control: bool = False
    # grid; ``variable`` x means 2 pi E / a (omega for the spectrum command)
    variable: str = "x"
    grid_min: float = 20.0
    grid_max: float = 160.0
    count: int = 4
    spacing: str = "log"
    workers: int = 1
    # tolerances
    ln_f_tol: float = 1e-8
    slack: float = 10.0
    decay_gate: float = -0.5
    # output
    out: str = "run"
    plot_data: bool = True

    # INI section of every field
    SECTIONS = {
        "switching": ("kind", "kappa", "ramp", "flat", "scale"),
        "physics": ("a",),
        "schedule": ("alpha", "p", "fixed_lambda", "degree", "control"),
        "grid": ("variable", "grid_min", "grid_max", "count", "spacing", "workers"),
        "tolerances": ("ln_f_tol", "slack", "decay_gate"),
        "output": ("out", "plot_data"),
    }

    def echo(self) -> dict:
        d = asdict(self)
        out = {"command": d.pop("command")}
        for section, keys in self.SECTIONS.items():
            out[section] = {k: d[k] for k in keys}
        return out

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"command: unknown {self.command!r} (choose from {', '.join(COMMANDS)})")
        if self.kind not in ("bump_product", "plateau", "rescaled"):
            raise UsageError(f"switching.kind: unknown {self.kind!r}")
        for name in ("kappa", "ramp", "scale", "a", "ln_f_tol", "slack", "grid_min", "grid_max"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0.0:
                raise UsageError(f"{name}: must be > 0 (got {v!r})")
        if not np.isfinite(self.flat) or self.flat < 0.0:
            raise UsageError(f"flat: must be >= 0 (got {self.flat!r})")
        if self.fixed_lambda is not None and not self.fixed_lambda > 0.0:
            raise UsageError(f"fixed_lambda: must be > 0 (got {self.fixed_lambda!r})")
        if self.count < 1:
            raise UsageError(f"count: grid needs at least 1 point (got {self.count})")
        if self.grid_max < self.grid_min:
            raise UsageError("grid_max: must not be below grid_min")
        if self.spacing not in ("linear", "log"):
            raise UsageError(f"spacing: expected linear or log (got {self.spacing!r})")
        if self.variable not in ("x", "E"):
            raise UsageError(f"variable: expected x or E (got {self.variable!r})")
        if self.degree < 1:
            raise UsageError(f"degree: must be >= 1 (got {self.degree})")
        if self.workers < 1:
            raise UsageError(f"workers: must be >= 1 (got {self.workers})")
        return self

    def grid(self) -> np.ndarray:
        """The grid in physical units (E, or omega for spectrum)."""
        if self.count == 1:
            g = np.array([self.grid_min])
        elif self.spacing == "log":
            g = np.geomspace(self.grid_min, self.grid_max, self.count)
        else:
            g = np.linspace(self.grid_min, self.grid_max, self.count)
        if self.command != "spectrum" and self.variable == "x":
            g = g * self.a / (2.0 * math.pi)
        return g


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, raw):
    kind = _FIELD_TYPES[name]
    if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none")):
        if "None" in str(kind):
            return None
        raise UsageError(f"{name}: a value is required")
    try:
        if "bool" in str(kind):
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if "int" in str(kind) and "float" not in str(kind):
            value = float(raw)
            if value != int(value):
                raise ValueError(raw)
            return int(value)
        if "float" in str(kind):
            return float(raw)
        return str(raw).strip()
    except (TypeError, ValueError):
        raise UsageError(f"{name}: cannot parse {raw!r} as {kind}") from None


def config_from_mapping(data: dict, command: str | None = None) -> RunConfig:
    """Build a config from a nested {section: {key: value}} mapping."""
    values = {}
    known = {k: s for s, keys in RunConfig.SECTIONS.items() for k in keys}
    for section, entries in data.items():
        if section == "command":
            values["command"] = str(entries)
            continue
        if section not in RunConfig.SECTIONS:
            raise UsageError(f"[{section}]: unknown config section")
        for key, raw in entries.items():
            if known.get(key) != section:
                raise UsageError(f"{section}.{key}: unknown config key")
            values[key] = _coerce(key, raw)
    cfg = RunConfig(**values)
    if command is not None:
        cfg.command = command
    return cfg


def read_config(path: str | Path, command: str | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    if path.suffix == ".json":
        try:
            data = json.loads(text)["config"]
        except (ValueError, KeyError):
            raise UsageError(f"config: {path} is not a run manifest") from None
        return config_from_mapping(data, command)
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise UsageError(f"config: {exc}") from None
    return config_from_mapping({s: dict(parser[s]) for s in parser.sections()}, command)


def build_switching(cfg: RunConfig) -> SwitchingFunction:
    if cfg.kind == "bump_product":
        return bump_product_switch(cfg.kappa)
    if cfg.kind == "plateau":
        return plateau_switch(cfg.ramp, cfg.flat)
    return Rescaled(bump_product_switch(cfg.kappa), cfg.scale)


# --------------------------------------------------------------------------
# output


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def emit_table(rows, schema, path: str | Path) -> Path:
    """Write rows (mappings keyed by the schema) as a UTF-8 CSV."""
    path = Path(path)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(schema)
    for row in rows:
        if set(row) != set(schema):
            raise ValueError(f"row keys {sorted(row)} do not match schema {list(schema)}")
        writer.writerow([_format(row[c]) for c in schema])
    try:
        path.write_text(buf.getvalue(), encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write table: {exc.strerror}", str(path)) from None
    return path


def read_table(path: str | Path) -> tuple[list[str], list[dict]]:
    """Parse a table written by ``emit_table``; numeric cells become floats."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for rec in reader:
            row = {}
            for k, v in zip(header, rec):
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
            rows.append(row)
    return header, rows


def _plot_file(out: Path, name: str, x, y) -> str:
    rows = [{"x": xi, "y": yi} for xi, yi in zip(x, y)]
    emit_table(rows, ("x", "y"), out / f"plot_{name}.csv")
    return f"plot_{name}.csv"


# --------------------------------------------------------------------------
# commands


def _run_spectrum(cfg: RunConfig, out: Path, manifest: dict):
    chi = build_switching(cfg)
    omega = cfg.grid()
    env = decay_envelope_fit(chi)
    ft = fourier_transform(chi, omega, envelope=env)
    ln_env = env.log(omega)
    rows = [
        {"omega": w, "abs_chi_hat": math.exp(la) if la > -745 else 0.0, "ln_abs_chi_hat": la,
         "ln_envelope": le, "abs_error": e}
        for w, la, le, e in zip(omega, ft.log_abs, ln_env, ft.abs_error)
    ]
    manifest["envelope"] = {
        "amplitude": env.amplitude, "rate": env.rate, "exponent": env.exponent,
        "power": env.power, "residual": env.residual, "window": list(env.window),
    }
    manifest["achieved"] = {"max_abs_error": float(np.max(ft.abs_error))}
    plots = [_plot_file(out, "ln_abs_chi_hat", omega, ft.log_abs), _plot_file(out, "ln_envelope", omega, ln_env)]
    return rows, plots


def _run_response(cfg: RunConfig, out: Path, manifest: dict):
    chi = build_switching(cfg)
    lam = cfg.fixed_lambda if cfg.fixed_lambda is not None else 1.0
    rows, worst = [], 0.0
    for E in cfg.grid():
        r = response_frequency(chi, E, lam, cfg.a, cfg.ln_f_tol)
        worst = max(worst, r.abs_error_ln)
        rows.append({
            "E": E, "lambda": lam, "ln_F": r.ln_value, "abs_error_ln": r.abs_error_ln,
            "ln_F_limit": ln_response_infinite_time_limit(chi, E, cfg.a), "ln_ratio": r.ln_ratio,
        })
    manifest["achieved"] = {"max_abs_error_ln": worst}
    plots = [
        _plot_file(out, "ln_F", [r["E"] for r in rows], [r["ln_F"] for r in rows]),
        _plot_file(out, "ln_F_limit", [r["E"] for r in rows], [r["ln_F_limit"] for r in rows]),
    ]
    return rows, plots


def _run_temp_scan(cfg: RunConfig, out: Path, manifest: dict):
    chi = build_switching(cfg)
    lam = cfg.fixed_lambda if cfg.fixed_lambda is not None else 1.0
    reference = 2.0 * math.pi / cfg.a
    rows, worst = [], 0.0
    for E in cfg.grid():
        rm = response_frequency(chi, -E, lam, cfg.a, cfg.ln_f_tol)
        rp = response_frequency(chi, E, lam, cfg.a, cfg.ln_f_tol)
        inv_t = temperature_estimate(rm.ln_value, rp.ln_value, E)
        worst = max(worst, rm.abs_error_ln, rp.abs_error_ln)
        rows.append({
            "E": E, "lambda": lam, "ln_F_minus": rm.ln_value, "ln_F_plus": rp.ln_value,
            "inv_T_est": inv_t, "T_est": 1.0 / inv_t if inv_t != 0.0 else math.inf,
            "deviation": temperature_estimate(rm.ln_ratio, rp.ln_ratio, E),
            "noise": (rm.ratio_error_ln + rp.ratio_error_ln) / E,
        })
    manifest["reference"] = {"T_unruh": cfg.a / (2.0 * math.pi), "inv_T_unruh": reference}
    manifest["achieved"] = {"max_abs_error_ln": worst}
    plots = [_plot_file(out, "T_est", [r["E"] for r in rows], [r["T_est"] for r in rows])]
    return rows, plots


def _report_outputs(report, out: Path, manifest: dict):
    manifest["verdict"] = report.verdict
    manifest["fitted_exponent"] = report.fitted_exponent
    manifest["notes"] = list(report.notes)
    manifest["reference"] = {"T_unruh": report.a / (2.0 * math.pi), "inv_T_unruh": 2.0 * math.pi / report.a}
    manifest["bounds"] = "leading-order terms only"
    manifest["achieved"] = {"max_deviation_noise": max(report.noise)}
    x = report.gap_variable
    plots = [
        _plot_file(out, "abs_deviation", x, [abs(d) for d in report.deviation]),
        _plot_file(out, "B_minus", x, [b.b_minus for b in report.bounds]),
        _plot_file(out, "B_plus", x, [b.b_plus for b in report.bounds]),
    ]
    return report.rows(), plots


def _run_thermality(cfg: RunConfig, out: Path, manifest: dict):
    chi = build_switching(cfg)
    try:
        schedule = ScalingSchedule(cfg.alpha, cfg.p, cfg.a, cfg.kappa)
    except InvalidParameterError as exc:
        raise UsageError(f"schedule: {exc}") from None
    report = thermality_scan(
        chi, schedule, list(cfg.grid()), tol=cfg.ln_f_tol, slack=cfg.slack,
        decay_gate=cfg.decay_gate, fixed_lambda=cfg.fixed_lambda, workers=cfg.workers,
    )
    return _report_outputs(report, out, manifest)


def _run_plateau(cfg: RunConfig, out: Path, manifest: dict):
    report = plateau_scan(
        cfg.ramp, cfg.flat, cfg.degree, list(cfg.grid()), a=cfg.a, control=cfg.control,
        tol=cfg.ln_f_tol, slack=cfg.slack, decay_gate=cfg.decay_gate, workers=cfg.workers,
    )
    return _report_outputs(report, out, manifest)


RUNNERS = {
    "spectrum": _run_spectrum,
    "response": _run_response,
    "temp-scan": _run_temp_scan,
    "thermality": _run_thermality,
    "plateau": _run_plateau,
}


def _table_name(command: str) -> str:
    return command.replace("-", "_") + ".csv"


def run(cfg: RunConfig) -> int:
    """Execute one run; the manifest is written whatever happens."""
    start = time.perf_counter()
    out = Path(cfg.out)
    manifest = {
        "tool": "kmslab",
        "version": __version__,
        "command": cfg.command,
        "config": cfg.echo(),
        "status": "ok",
        "errors": [],
        "files": [],
    }
    status = EXIT_OK
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory {out}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg.validate()
        rows, plots = RUNNERS[cfg.command](cfg, out, manifest)
        table = emit_table(rows, SCHEMAS[cfg.command], out / _table_name(cfg.command))
        manifest["files"] = [table.name] + (plots if cfg.plot_data else [])
        if not cfg.plot_data:
            for name in plots:
                (out / name).unlink(missing_ok=True)
    except (UsageError, InvalidParameterError) as exc:
        status = EXIT_USAGE
        manifest["errors"].append({"type": "usage", "message": str(exc)})
    except (QuadratureError, EnvelopeFitError, UndefinedTemperatureError, ArithmeticError) as exc:
        status = EXIT_NUMERICAL
        record = {"type": "numerical", "class": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "estimate", None) is not None:
            record["estimate"] = repr(exc.estimate)
        manifest["errors"].append(record)
    except OSError as exc:
        status = EXIT_NUMERICAL
        manifest["errors"].append({"type": "io", "message": f"{exc.filename}: {exc.strerror}"})
    if status != EXIT_OK:
        manifest["status"] = "error"
        # a failed run leaves no partial tables behind
        for name in manifest["files"]:
            (out / name).unlink(missing_ok=True)
        manifest["files"] = []
        print(f"error: {manifest['errors'][-1]['message']}", file=sys.stderr)
    manifest["wall_time_s"] = time.perf_counter() - start
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n", encoding="utf-8")
    return status


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kmslab", description="Detector response and Unruh thermality runs.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="INI config file, or a previous manifest.json")
    ap.add_argument("--a", type=float, help="proper acceleration")
    ap.add_argument("--kappa", type=float, help="bump-product rate")
    ap.add_argument("--alpha", type=float, help="schedule prefactor")
    ap.add_argument("--p", type=float, help="schedule exponent")
    ap.add_argument("--emin", type=float, help="grid minimum")
    ap.add_argument("--emax", type=float, help="grid maximum")
    ap.add_argument("--points", type=int, help="grid point count")
    ap.add_argument("--out", help="output directory")
    return ap


_OVERRIDES = {
    "a": "a", "kappa": "kappa", "alpha": "alpha", "p": "p",
    "emin": "grid_min", "emax": "grid_max", "points": "count", "out": "out",
}

_COMMAND_DEFAULTS = {
    "plateau": {"kind": "plateau"},
    "spectrum": {"variable": "E", "grid_min": 1.0, "grid_max": 1e4, "count": 60},
    "response": {"variable": "E", "grid_min": 0.5, "grid_max": 5.0, "count": 10, "spacing": "linear"},
    "temp-scan": {"variable": "E", "grid_min": 0.5, "grid_max": 5.0, "count": 10,
                  "spacing": "linear", "fixed_lambda": 100.0},
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = read_config(args.config, args.command)
        else:
            cfg = RunConfig(command=args.command, **_COMMAND_DEFAULTS.get(args.command, {}))
    except UsageError as exc:
        cfg = RunConfig(command=args.command)
        if args.out:
            cfg.out = args.out
        return _fail_early(cfg, exc)
    for opt, name in _OVERRIDES.items():
        value = getattr(args, opt)
        if value is not None:
            setattr(cfg, name, value)
    return run(cfg)


def _fail_early(cfg: RunConfig, exc: Exception) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "tool": "kmslab", "version": __version__, "command": cfg.command, "config": None,
        "status": "error", "errors": [{"type": "usage", "message": str(exc)}], "files": [],
        "wall_time_s": 0.0,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
