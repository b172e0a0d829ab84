"""``casalter`` command-line front end.

    casalter <experiment> [--config PATH] [--set key=value]... [--out PATH]
             [--format csv|json] [--threads N]

Exit codes: 0 success, 2 configuration error, 3 convergence error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotics import (
    classify_regime,
    scaling_probe,
    torque_high_temperature,
    torque_non_retarded,
)
from .config import EXPERIMENTS, ConfigError, emit_config, parse_config
from .constants import HBAR_EV, SIGMA0
from .errors import ConvergenceError, InvalidInputError
from .lattice import band_path
from .lifshitz import AltermagnetSheet, casimir_energy, casimir_torque, matsubara_grid
from .optics import WaveArgs, reflection_full
from .response import anisotropy, kubo_spectrum

__all__ = ["ResultRecord", "run_experiment", "write_record", "main"]

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4

DEFAULT_GRIDS = {
    "torque-vs-theta": ("theta", lambda: np.linspace(0.0, math.pi, 17)),
    "torque-vs-B": ("B", lambda: np.linspace(-10.0, 10.0, 21)),
    "torque-vs-d": ("d", lambda: np.geomspace(10e-9, 50e-6, 20)),
    "conductivity": ("xi", lambda: np.geomspace(1e-3, 10.0, 20)),
    "reflection": ("k_par", lambda: np.geomspace(1e5, 1e9, 9)),
}
ASYMPTOTIC_GRIDS = {
    "non_retarded": lambda: np.geomspace(2e-9, 10e-9, 5),
    "retarded": lambda: np.geomspace(1e-6, 5e-6, 6),
    "high_temperature": lambda: np.geomspace(10e-6, 30e-6, 5),
}
ALLOWED_AXES = {
    "torque": ("theta", "B", "d", "T"),
    "energy": ("theta", "B", "d", "T"),
    "torque-vs-theta": ("theta",),
    "torque-vs-B": ("B",),
    "torque-vs-d": ("d",),
    "conductivity": ("xi", "omega"),
    "asymptotics": ("d",),
    "reflection": ("k_par",),
    "bands": (),
}


@dataclass
class ResultRecord:
    """Table produced by one experiment plus header material."""

    experiment: str
    columns: list
    rows: list
    config_text: str
    summary: dict = field(default_factory=dict)
    version: str = __version__
    timestamp: str = ""

    def header_lines(self):
        lines = [
            f"casalter {self.version}",
            f"experiment: {self.experiment}",
            f"timestamp: {self.timestamp}",
            "config:",
        ]
        lines += ["  " + ln for ln in self.config_text.splitlines()]
        lines += [f"{k}: {_fmt_cell(v)}" for k, v in self.summary.items()]
        return lines


def _fmt_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15e}"
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt_cell(x) for x in v)
    return str(v)


def render_csv(record):
    out = ["# " + ln for ln in record.header_lines()]
    out.append(",".join(record.columns))
    out += [",".join(_fmt_cell(c) for c in row) for row in record.rows]
    return "\n".join(out) + "\n"


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render_json(record):
    doc = {
        "casalter_version": record.version,
        "experiment": record.experiment,
        "timestamp": record.timestamp,
        "config": record.config_text,
        "summary": {k: _jsonable(v) for k, v in record.summary.items()},
        "columns": record.columns,
        "rows": [[_jsonable(c) for c in row] for row in record.rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def write_record(record, path, fmt="csv"):
    """Write atomically: temp file in the target directory, then rename."""
    text = render_csv(record) if fmt == "csv" else render_json(record)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".casalter-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- experiments ---------------------------------------------------------------

class _SheetCache:
    """Builds AltermagnetSheets once per distinct ModelParams."""

    def __init__(self, kubo):
        self.kubo = kubo
        self._cache = {}

    def __call__(self, params):
        if params not in self._cache:
            self._cache[params] = AltermagnetSheet(params, self.kubo)
        return self._cache[params]


def _sweep(cfg):
    axis_default, grid_default = DEFAULT_GRIDS.get(cfg.experiment, (None, None))
    axis = cfg.sweep.axis or axis_default
    grid = cfg.sweep.grid()
    if axis is None and cfg.sweep.is_set:
        raise ConfigError(f"experiment {cfg.experiment!r} takes no sweep")
    if axis is not None and axis not in ALLOWED_AXES[cfg.experiment]:
        raise ConfigError(f"sweep.axis {axis!r} is not valid for experiment {cfg.experiment!r}")
    if grid is None and grid_default is not None and axis == axis_default:
        grid = grid_default()
    if axis is not None and grid is None:
        raise ConfigError(f"sweep.axis = {axis} needs sweep.values or start/stop/count")
    return axis, grid


def _point(cfg, axis, value):
    """RunConfig with one swept value applied."""
    if axis is None:
        return cfg
    if axis == "theta":
        return cfg.with_(lifshitz=cfg.lifshitz.with_(theta=float(value)))
    if axis == "d":
        return cfg.with_(lifshitz=cfg.lifshitz.with_(d=float(value)))
    if axis == "T":
        return cfg.with_(lifshitz=cfg.lifshitz.with_(T=float(value)))
    if axis == "B":
        return cfg.with_(sheet1=cfg.sheet1.with_(B=float(value)), sheet2=cfg.sheet2.with_(B=float(value)))
    raise ConfigError(f"axis {axis!r} does not apply here")


def _series_experiment(cfg, threads, kind):
    axis, grid = _sweep(cfg)
    sheets = _SheetCache(cfg.kubo)
    rows = []
    for value in ([None] if grid is None else grid):
        pt = _point(cfg, axis, value)
        p1, p2 = pt.sheets()
        lif = pt.lifshitz.with_(threads=threads)
        fn = casimir_torque if kind == "torque" else casimir_energy
        res = fn(sheets(p1), sheets(p2), lif)
        rows.append([lif.theta, lif.d, lif.T, p1.B, res.value, res.n_used, res.quadrature_estimate_error])
    cols = ["theta_rad", "d_m", "T_K", "B_T", "torque_Nm" if kind == "torque" else "energy_J", "n_used", "est_err"]
    summary = {}
    if kind == "torque" and axis == "theta" and len(rows) >= 3:
        th = np.array([r[0] for r in rows])
        tau = np.array([r[4] for r in rows])
        amp, rms = fit_sin2theta(th, tau)
        summary.update({"fit_amplitude_Nm": amp, "fit_rms_over_amplitude": rms})
    if kind == "torque" and axis == "B" and len(rows) >= 2:
        summary["sign_changes_B_T"] = sign_change_brackets([r[3] for r in rows], [r[4] for r in rows])
    return cols, rows, summary


def fit_sin2theta(theta, tau):
    """Least-squares amplitude A of tau = A sin 2theta and RMS residual / |A|."""
    s = np.sin(2.0 * np.asarray(theta))
    tau = np.asarray(tau, dtype=float)
    amp = float(np.dot(s, tau) / np.dot(s, s))
    rms = float(np.sqrt(np.mean((tau - amp * s) ** 2)))
    return amp, (rms / abs(amp) if amp != 0 else math.inf)


def sign_change_brackets(x, y, rel_zero=1e-9):
    """Roots located from samples: zero samples, else midpoints of sign changes.

    Values below ``rel_zero * max|y|`` count as zero, so quadrature noise at an
    exact root does not fake extra sign changes next to it.
    """
    x = [float(v) for v in x]
    y = np.asarray(y, dtype=float)
    scale = float(np.max(np.abs(y))) if y.size else 0.0
    y = np.where(np.abs(y) <= rel_zero * scale, 0.0, y)
    out = [x[i] for i in range(len(x)) if y[i] == 0.0]
    nz = [i for i in range(len(x)) if y[i] != 0.0]
    for i, j in zip(nz, nz[1:]):
        if j == i + 1 and y[i] * y[j] < 0:
            out.append(0.5 * (x[i] + x[j]))
    return sorted(out)


def _conductivity(cfg, threads):
    axis, grid = _sweep(cfg)
    p1, _ = cfg.sheets()
    spec = kubo_spectrum(p1, cfg.kubo)
    rows = []
    for x in grid:
        freq = 1j * x if axis == "xi" else complex(x)
        ct = spec.tensor(freq)
        row = [float(x)]
        for c in (ct.sxx, ct.sxy, ct.syx, ct.syy):
            row += [float(np.real(c)), float(np.imag(c))]
        if axis == "xi":
            an = anisotropy(ct.real())
            row += [float(an.delta), float(an.sigma_t_tilde)]
        else:
            tr = complex(ct.sxx + ct.syy)
            row += [float(np.real((ct.sxx - ct.syy) / tr)), float(np.real(tr / SIGMA0))]
        rows.append(row)
    cols = ["xi_eV" if axis == "xi" else "omega_eV"]
    for c in ("sxx", "sxy", "syx", "syy"):
        cols += [f"re_{c}", f"im_{c}"]
    cols += ["delta", "sigma_t_tilde"]
    return cols, rows, {"units": "siemens"}


def _bands(cfg, threads):
    _sweep(cfg)
    p1, _ = cfg.sheets()
    path = [p.strip() for p in cfg.band_path.split(",") if p.strip()]
    up = band_path(p1, 1, path, cfg.band_samples)
    down = band_path(p1, -1, path, cfg.band_samples)
    rows = [list(map(float, np.concatenate([u, d[1:]]))) for u, d in zip(up, down)]
    cols = ["arclength", "up_E1", "up_E2", "up_E3", "down_E1", "down_E2", "down_E3"]
    return cols, rows, {"path": cfg.band_path}


def _asymptotics(cfg, threads):
    regime_tag = cfg.regime
    if cfg.sweep.axis and cfg.sweep.axis != "d":
        raise ConfigError(f"sweep.axis {cfg.sweep.axis!r} is not valid for experiment 'asymptotics'")
    grid = cfg.sweep.grid()
    if grid is None:
        grid = ASYMPTOTIC_GRIDS[regime_tag]()
    p1, p2 = cfg.sheets()
    s1 = AltermagnetSheet(p1, cfg.kubo)
    s2 = s1 if p2 == p1 else AltermagnetSheet(p2, cfg.kubo)
    lif = cfg.lifshitz.with_(threads=threads)
    full = {}

    def pipeline(d):
        full[d] = casimir_torque(s1, s2, lif.with_(d=float(d))).value
        return full[d]

    fit = scaling_probe(pipeline, regime_tag, grid, lif)
    rows = []
    xi1 = matsubara_grid(lif.T, 1)[1]
    for d in grid:
        pt = lif.with_(d=float(d))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if regime_tag == "non_retarded":
                lim = torque_non_retarded(s1, s2, pt)
            elif regime_tag == "high_temperature":
                lim = torque_high_temperature(s1.tensor_at(xi1), s2.tensor_at(xi1), pt)
            else:
                lim = full[grid[0]] * (grid[0] / d) ** 3
        rows.append([float(d), full[d], lim, lim / full[d] if full[d] != 0 else math.nan])
    _, scales = classify_regime(float(grid[0]), lif.T, cfg.hbar_omega0)
    summary = {
        "regime": regime_tag,
        "slope": fit.slope,
        "slope_ci95": fit.slope_ci95,
        "residual_band": fit.residual_band,
    }
    summary.update({f"scale {k} (eV)": v for k, v in scales.items()})
    return ["d_m", "tau_full", "tau_limit", "ratio"], rows, summary


def _reflection(cfg, threads):
    axis, grid = _sweep(cfg)
    p1, _ = cfg.sheets()
    sheet = AltermagnetSheet(p1, cfg.kubo)
    xi = matsubara_grid(cfg.lifshitz.T, 1)[1]
    ct = sheet.tensor_at(xi)
    rows = []
    for k in grid:
        for phi in np.linspace(0.0, math.pi / 2, 5):
            r = reflection_full(ct, WaveArgs(xi, float(k), float(phi)))
            rows.append([xi, float(k), float(phi)] + [float(v) for v in r])
    return ["xi_rad_s", "k_par_m", "phi_rad", "rss", "rsp", "rps", "rpp"], rows, {"xi_eV": xi * HBAR_EV}


_RUNNERS = {
    "torque": lambda c, t: _series_experiment(c, t, "torque"),
    "energy": lambda c, t: _series_experiment(c, t, "energy"),
    "torque-vs-theta": lambda c, t: _series_experiment(c, t, "torque"),
    "torque-vs-B": lambda c, t: _series_experiment(c, t, "torque"),
    "torque-vs-d": lambda c, t: _series_experiment(c, t, "torque"),
    "conductivity": _conductivity,
    "bands": _bands,
    "asymptotics": _asymptotics,
    "reflection": _reflection,
}


def run_experiment(cfg, threads=1, timestamp=None):
    """Run ``cfg.experiment`` and return its :class:`ResultRecord`."""
    cols, rows, summary = _RUNNERS[cfg.experiment](cfg, threads)
    ts = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return ResultRecord(cfg.experiment, cols, rows, emit_config(cfg), summary, timestamp=ts)


# -- entry point ---------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="casalter", description="Casimir torque between 2D altermagnets")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="flat section.key = value file")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one key")
    ap.add_argument("--out", help="output file (default: output.path or ./<experiment>.<format>)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--threads", type=int, help="worker threads (fallback: CASALTER_THREADS)")
    ap.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    return ap


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get("CASALTER_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"CASALTER_THREADS must be an integer, got {env!r}") from None
    return 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, [*args.set, f"run.experiment={args.experiment}"])
        threads = _threads(args)
        if threads < 1:
            raise ConfigError("--threads must be >= 1")
    except (ConfigError, InvalidInputError) as exc:
        print(f"casalter: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.print_config:
        sys.stdout.write(emit_config(cfg))
        return EXIT_OK

    fmt = args.format or cfg.output.format
    path = args.out or cfg.output.path or f"{args.experiment}.{fmt}"
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
        print(f"casalter: I/O error: output directory not writable: {directory}", file=sys.stderr)
        return EXIT_IO

    try:
        record = run_experiment(cfg, threads)
    except ConvergenceError as exc:
        print(f"casalter: convergence error in {args.experiment}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ConfigError, InvalidInputError) as exc:
        print(f"casalter: config error in {args.experiment}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        write_record(record, path, fmt)
    except OSError as exc:
        print(f"casalter: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{args.experiment}: {len(record.rows)} rows -> {path}")
    for k, v in record.summary.items():
        print(f"  {k}: {_fmt_cell(v)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
