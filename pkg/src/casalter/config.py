"""Flat ``section.key = value`` run configuration.

Example::

    # two sheets, sheet 2 exchange-biased
    sheet1.B = 10
    sheet2.B_bias = 5
    lifshitz.d = 30e-9
    sweep.axis = B
    sweep.start = -8
    sweep.stop = 3
    sweep.count = 12

Every ``sheet2`` key not given inherits the ``sheet1`` value.  Unknown keys,
duplicates and out-of-range values are errors that cite line numbers.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import CasalterError, InvalidInputError
from .lattice import ModelParams
from .lifshitz import LifshitzConfig
from .response import KuboConfig

__all__ = [
    "ConfigError",
    "SweepSpec",
    "OutputSpec",
    "RunConfig",
    "EXPERIMENTS",
    "SWEEP_AXES",
    "parse_config",
    "parse_config_text",
    "emit_config",
]

EXPERIMENTS = (
    "bands",
    "conductivity",
    "torque",
    "energy",
    "torque-vs-theta",
    "torque-vs-B",
    "torque-vs-d",
    "asymptotics",
    "reflection",
)

# sweep axis -> what it drives
SWEEP_AXES = ("theta", "B", "d", "T", "xi", "omega", "k_par")

REGIMES = ("non_retarded", "high_temperature", "retarded")


class ConfigError(CasalterError, ValueError):
    """Malformed, unknown, duplicated or out-of-range configuration entry."""


@dataclass(frozen=True)
class SweepSpec:
    """Swept axis with either explicit ``values`` or (start, stop, count, spacing)."""

    axis: str = ""
    values: tuple = ()
    start: float | None = None
    stop: float | None = None
    count: int | None = None
    spacing: str = "lin"

    def __post_init__(self):
        if self.axis and self.axis not in SWEEP_AXES:
            raise InvalidInputError(f"sweep.axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if self.spacing not in ("lin", "log"):
            raise InvalidInputError(f"sweep.spacing must be lin|log, got {self.spacing!r}")
        if self.count is not None and self.count < 1:
            raise InvalidInputError("sweep.count must be >= 1")

    @property
    def is_set(self):
        return bool(self.values) or None not in (self.start, self.stop, self.count)

    def grid(self):
        """Swept values as an array, or ``None`` if the sweep is unset."""
        if self.values:
            return np.asarray(self.values, dtype=float)
        if None in (self.start, self.stop, self.count):
            return None
        if self.spacing == "log":
            if self.start <= 0 or self.stop <= 0:
                raise InvalidInputError("log spacing needs positive start and stop")
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class OutputSpec:
    path: str = ""
    format: str = "csv"

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise InvalidInputError(f"output.format must be csv|json, got {self.format!r}")


@dataclass(frozen=True)
class RunConfig:
    """Everything one experiment run needs.

    ``sync_temperature`` sets each sheet's electronic temperature to
    ``lifshitz.T`` so one temperature governs both the conductivity and the
    Matsubara ladder.
    """

    sheet1: ModelParams = field(default_factory=lambda: ModelParams(B=10.0))
    sheet2: ModelParams = field(default_factory=lambda: ModelParams(B=10.0))
    kubo: KuboConfig = field(default_factory=KuboConfig)
    lifshitz: LifshitzConfig = field(default_factory=LifshitzConfig)
    experiment: str = "torque"
    sweep: SweepSpec = field(default_factory=SweepSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    seed: int = 0
    sync_temperature: bool = True
    regime: str = "retarded"
    hbar_omega0: float = 1.0
    band_path: str = "G,X,M,G"
    band_samples: int = 50

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InvalidInputError(f"run.experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.regime not in REGIMES:
            raise InvalidInputError(f"asymptotics.regime must be one of {REGIMES}, got {self.regime!r}")
        if not self.hbar_omega0 > 0:
            raise InvalidInputError("asymptotics.hbar_omega0 must be > 0")
        if self.band_samples < 1:
            raise InvalidInputError("bands.samples must be >= 1")

    def with_(self, **changes):
        return replace(self, **changes)

    def sheets(self):
        """ModelParams of both sheets with the temperature rule applied."""
        if not self.sync_temperature:
            return self.sheet1, self.sheet2
        T = self.lifshitz.T
        return self.sheet1.with_(temperature=T), self.sheet2.with_(temperature=T)


# -- schema -------------------------------------------------------------------

def _to_bool(text):
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _to_int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _to_opt_int(text):
    return None if text.lower() in ("auto", "none", "") else _to_int(text)


def _to_opt_float(text):
    return None if text.lower() in ("none", "") else float(text)


def _to_floats(text):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    return tuple(float(p) for p in parts)


def _field_parser(cls, name):
    if cls is ModelParams and name == "zeeman_sites":
        return str
    if cls is ModelParams:
        return float
    if cls is KuboConfig:
        return {"grid_n": _to_int, "bins": _to_int, "cell_area": float, "degeneracy_tol": float}.get(name, str)
    if cls is LifshitzConfig:
        return {
            "n_max": _to_opt_int,
            "k_nodes": _to_int,
            "phi_nodes": _to_int,
            "threads": _to_int,
            "derivative": str,
            "torque_form": str,
        }.get(name, float)
    raise KeyError(name)


# (section, key) -> (RunConfig attribute, sub-attribute or None, parser)
_SCHEMA = {}
for _sec, _cls in (("sheet1", ModelParams), ("sheet2", ModelParams), ("kubo", KuboConfig), ("lifshitz", LifshitzConfig)):
    for _f in fields(_cls):
        if _cls is LifshitzConfig and _f.name == "threads":
            continue
        _SCHEMA[f"{_sec}.{_f.name}"] = (_sec, _f.name, _field_parser(_cls, _f.name))
_SCHEMA.update(
    {
        "run.experiment": ("experiment", None, str),
        "run.seed": ("seed", None, _to_int),
        "run.sync_temperature": ("sync_temperature", None, _to_bool),
        "sweep.axis": ("sweep", "axis", str),
        "sweep.values": ("sweep", "values", _to_floats),
        "sweep.start": ("sweep", "start", _to_opt_float),
        "sweep.stop": ("sweep", "stop", _to_opt_float),
        "sweep.count": ("sweep", "count", _to_opt_int),
        "sweep.spacing": ("sweep", "spacing", str),
        "output.path": ("output", "path", str),
        "output.format": ("output", "format", str),
        "asymptotics.regime": ("regime", None, str),
        "asymptotics.hbar_omega0": ("hbar_omega0", None, float),
        "bands.path": ("band_path", None, str),
        "bands.samples": ("band_samples", None, _to_int),
    }
)

_SECTION_TYPES = {
    "sheet1": ModelParams,
    "sheet2": ModelParams,
    "kubo": KuboConfig,
    "lifshitz": LifshitzConfig,
    "sweep": SweepSpec,
    "output": OutputSpec,
}


def _read_lines(lines, source):
    """Parse text lines into {key: (raw value, location)}; location is a label."""
    entries = {}
    for i, raw in enumerate(lines, start=1):
        loc = f"{source}:{i}"
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{loc}: expected 'section.key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"{loc}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"{loc}: duplicate key {key!r} (first set at {entries[key][1]})")
        entries[key] = (value, loc)
    return entries


def _build(entries):
    """Turn parsed entries into a RunConfig, attributing errors to lines."""
    typed = {}
    for key, (value, loc) in entries.items():
        parser = _SCHEMA[key][2]
        try:
            typed[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{loc}: cannot parse {key!r}: {exc}") from None

    sections = {name: {} for name in _SECTION_TYPES}
    top = {}
    for key, value in typed.items():
        attr, sub, _ = _SCHEMA[key]
        if sub is None:
            top[attr] = value
        else:
            sections[attr][sub] = value
    # sheet 2 inherits everything sheet 1 sets
    sections["sheet2"] = {**sections["sheet1"], **sections["sheet2"]}

    built = {}
    for name, cls in _SECTION_TYPES.items():
        kwargs = dict(sections[name])
        if name in ("sheet1", "sheet2"):
            kwargs.setdefault("B", 10.0)
        built[name] = _construct(cls, kwargs, name, entries)
    try:
        return RunConfig(**built, **top)
    except InvalidInputError as exc:
        for key in entries:
            attr, sub, _ = _SCHEMA[key]
            if sub is not None:
                continue
            try:
                RunConfig(**{attr: typed[key]})
            except InvalidInputError:
                raise ConfigError(f"{entries[key][1]}: {key} out of range: {exc}") from None
        raise ConfigError(str(exc)) from None


def _construct(cls, kwargs, section, entries):
    try:
        return cls(**kwargs)
    except InvalidInputError as exc:
        # find which single key is out of range
        for sub, value in kwargs.items():
            try:
                cls(**({"B": kwargs["B"]} if cls is ModelParams and sub != "B" else {}), **{sub: value})
            except InvalidInputError:
                key = f"{section}.{sub}"
                if key not in entries and section == "sheet2":
                    key = f"sheet1.{sub}"
                loc = entries[key][1] if key in entries else "<config>"
                raise ConfigError(f"{loc}: {key} out of range: {exc}") from None
        raise ConfigError(f"{section}: {exc}") from None


def parse_config_text(text, overrides=(), source="<config>"):
    """Parse configuration text plus ``key=value`` overrides (later wins)."""
    entries = _read_lines(text.splitlines(), source)
    for j, item in enumerate(overrides, start=1):
        if "=" not in item:
            raise ConfigError(f"--set #{j}: expected key=value, got {item!r}")
        key, value = (p.strip() for p in item.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"--set #{j}: unknown key {key!r}")
        entries[key] = (value, f"--set #{j}")
    return _build(entries)


def parse_config(path=None, overrides=()):
    """Read a config file (or none) and apply overrides.

    Raises
    ------
    ConfigError
        Missing file, malformed line, unknown or duplicate key, bad value.
    """
    if path is None:
        return parse_config_text("", overrides)
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), overrides, source=str(path))


def _fmt(value):
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def emit_config(cfg):
    """Serialize every key of ``cfg``; :func:`parse_config_text` inverts it."""
    out = []
    for key, (attr, sub, _) in _SCHEMA.items():
        obj = getattr(cfg, attr)
        value = obj if sub is None else getattr(obj, sub)
        if key in ("sweep.start", "sweep.stop", "sweep.count") and value is None:
            continue
        if isinstance(value, str) and value == "" and key in ("output.path", "sweep.axis"):
            continue
        if key == "sweep.values" and not value:
            continue
        if isinstance(value, float) and not math.isfinite(value):
            raise InvalidInputError(f"{key} is not finite")
        out.append(f"{key} = {_fmt(value)}")
    return "\n".join(out) + "\n"
