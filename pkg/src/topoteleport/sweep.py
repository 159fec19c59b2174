"""Parameter sweeps over the model and deterministic CSV / JSON emission."""
from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from . import __version__
from .channel import channel_state
from .metrology import qfi_b1
from .qmatrix import PureStateParams, fidelity, input_state
from .resources import blp_witness, coherence_l1, concurrence_x, discord_x, hss_witness
from .specfun import EnvironmentParams
from .teleport import average_fidelity, output_state

__all__ = [
    "PARAMETERS",
    "OUTPUTS",
    "DEFAULTS",
    "ConfigError",
    "Axis",
    "SweepConfig",
    "ResultRow",
    "parse_config",
    "load_config",
    "run_sweep",
    "columns",
    "config_hash",
    "write_csv",
    "write_json",
]

PARAMETERS = ("Q1", "Q2", "gamma1", "gamma2", "B1", "B2", "theta", "phi", "vartheta")
OUTPUTS = (
    "qfi", "fi", "f_avg", "fidelity",
    "concurrence_ch", "concurrence_out", "discord_ch", "discord_out",
    "coherence_ch", "coherence_out", "hss", "trace_dist", "alpha1", "alpha2",
)
DEFAULTS = {
    "Q1": 1.0, "Q2": 1.0, "gamma1": 1.0, "gamma2": 1.0, "B1": 1.0, "B2": 1.0,
    "theta": math.pi / 2, "phi": 0.0, "vartheta": math.pi / 2,
}
MAX_AXES = 3
_RANGES = {
    "Q1": (0.0, math.inf), "Q2": (0.0, math.inf),
    "B1": (0.0, math.inf), "B2": (0.0, math.inf),
    "theta": (0.0, math.pi), "vartheta": (0.0, math.pi),
    "phi": (-math.inf, math.inf),
}


def _in_range(name: str, v: float) -> bool:
    if name in ("gamma1", "gamma2"):
        return v > 0
    lo, hi = _RANGES[name]
    return lo <= v <= hi


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None,
                 source: str = "<config>"):
        where = source if line is None else f"{source}:{line}"
        prefix = f"{where}: " + (f"field '{key}': " if key else "")
        super().__init__(prefix + message)
        self.detail = message
        self.line = line
        self.key = key


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass
class SweepConfig:
    """What to evaluate and on which grid.

    ``ties`` maps a parameter to the swept parameter it follows, e.g.
    ``{"Q1": "Q2"}`` moves both Ohmicities together.
    """

    fixed: dict = field(default_factory=dict)
    swept: list = field(default_factory=list)
    outputs: tuple = ("alpha1", "alpha2")
    time_grid: tuple = (0.0, 5.0, 101)
    ties: dict = field(default_factory=dict)

    def validate(self) -> "SweepConfig":
        for k, v in self.fixed.items():
            if k not in PARAMETERS:
                raise ConfigError(f"unknown parameter (known: {', '.join(PARAMETERS)})", key=k)
            if not math.isfinite(v) or not _in_range(k, v):
                raise ConfigError(f"value {v} out of range", key=k)
        if len(self.swept) > MAX_AXES:
            raise ConfigError(f"at most {MAX_AXES} swept axes allowed", key="sweep")
        names = [ax.name for ax in self.swept]
        if len(set(names)) != len(names):
            raise ConfigError("parameter swept twice", key="sweep")
        for ax in self.swept:
            if ax.name not in PARAMETERS:
                raise ConfigError("unknown parameter", key=f"sweep.{ax.name}")
            if ax.count < 2:
                raise ConfigError("count must be >= 2", key=f"sweep.{ax.name}")
            if not all(math.isfinite(v) and _in_range(ax.name, v) for v in (ax.start, ax.stop)):
                raise ConfigError("axis end point out of range", key=f"sweep.{ax.name}")
            if ax.name in self.fixed:
                raise ConfigError("parameter is both fixed and swept", key=ax.name)
        for k, target in self.ties.items():
            if k not in PARAMETERS or target not in names:
                raise ConfigError("ties must map a parameter to a swept one", key=f"tie.{k}")
            if k in names or k in self.fixed:
                raise ConfigError("tied parameter cannot also be fixed or swept", key=f"tie.{k}")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad or not self.outputs:
            raise ConfigError(f"unknown outputs {bad} (known: {', '.join(OUTPUTS)})", key="outputs")
        t0, t1, n = self.time_grid
        if not (t0 >= 0 and t1 >= t0 and n >= 1 and (n > 1 or t1 == t0)):
            raise ConfigError("need 0 <= t_start <= t_stop and n_points >= 1", key="time")
        return self

    def canonical(self) -> dict:
        return {
            "fixed": {k: float(self.fixed[k]) for k in sorted(self.fixed)},
            "swept": [[a.name, float(a.start), float(a.stop), int(a.count)] for a in self.swept],
            "ties": {k: self.ties[k] for k in sorted(self.ties)},
            "outputs": list(self.outputs),
            "time": [float(self.time_grid[0]), float(self.time_grid[1]), int(self.time_grid[2])],
        }

    def times(self) -> np.ndarray:
        t0, t1, n = self.time_grid
        return np.linspace(t0, t1, int(n))


@dataclass(frozen=True)
class ResultRow:
    coords: tuple
    t: float
    values: dict
    flag: str = ""
    error: str = ""


def _numbers(text: str, key: str, line: int, source: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"expected numbers, got {text!r}", line, key, source) from None


def parse_config(text: str, source: str = "<config>") -> SweepConfig:
    """Parse the key-value config format.

    ::

        # fixed parameters
        B1 = 0.5
        sweep.Q2 = 1, 4, 4      # start, stop, count
        tie.Q1 = Q2
        outputs = qfi, f_avg
        time = 0, 5, 101        # t_start, t_stop, n_points
    """
    cfg = SweepConfig()
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno, None, source)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"duplicate key (first on line {seen[key]})", lineno, key, source)
        seen[key] = lineno
        if key == "outputs":
            cfg.outputs = tuple(v.strip() for v in value.replace(",", " ").split())
        elif key == "time":
            nums = _numbers(value, key, lineno, source)
            if len(nums) != 3 or nums[2] != int(nums[2]):
                raise ConfigError("expected 't_start, t_stop, n_points'", lineno, key, source)
            cfg.time_grid = (nums[0], nums[1], int(nums[2]))
        elif key.startswith("sweep."):
            nums = _numbers(value, key, lineno, source)
            if len(nums) != 3 or nums[2] != int(nums[2]):
                raise ConfigError("expected 'start, stop, count'", lineno, key, source)
            cfg.swept.append(Axis(key[6:], nums[0], nums[1], int(nums[2])))
        elif key.startswith("tie."):
            cfg.ties[key[4:]] = value
        else:
            nums = _numbers(value, key, lineno, source)
            if len(nums) != 1:
                raise ConfigError("expected a single number", lineno, key, source)
            cfg.fixed[key] = nums[0]
    try:
        return cfg.validate()
    except ConfigError as exc:
        line = seen.get(exc.key or "")
        if line is None and exc.key:
            # bare parameter names may come from fixed, sweep.* or tie.* lines
            line = seen.get(f"sweep.{exc.key}", seen.get(f"tie.{exc.key}"))
        raise ConfigError(exc.detail, line, exc.key, source) from None


def load_config(path) -> SweepConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def config_hash(cfg: SweepConfig) -> str:
    blob = json.dumps(cfg.canonical(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def columns(cfg: SweepConfig) -> list[str]:
    return [a.name for a in cfg.swept] + ["t"] + list(cfg.outputs) + ["flag", "error"]


def _evaluate(params: dict, t: float, outputs: Iterable[str]) -> tuple[dict, str, str]:
    env1 = EnvironmentParams(params["Q1"], params["gamma1"], params["B1"])
    env2 = EnvironmentParams(params["Q2"], params["gamma2"], params["B2"])
    angles = PureStateParams(params["theta"], params["phi"] % (2 * math.pi), params["vartheta"])
    snap = channel_state(t, env1, env2, angles.vartheta)
    rho_out = None
    est = None
    flags = []
    values = {}
    for name in outputs:
        if name in ("qfi", "fi"):
            if est is None:
                est = qfi_b1(t, env1, env2, angles)
                if est.continuity:
                    flags.append("qfi:continuity")
            values[name] = est.qfi if name == "qfi" else est.fi_optimal_povm
            continue
        if name.endswith("_out") or name == "fidelity":
            if rho_out is None:
                rho_out = output_state(snap.alpha, angles)
        if name == "f_avg":
            values[name] = average_fidelity(snap.alpha, angles.vartheta)
        elif name == "fidelity":
            values[name] = fidelity(rho_out, input_state(angles))
        elif name == "alpha1":
            values[name] = snap.alpha1.alpha
        elif name == "alpha2":
            values[name] = snap.alpha2.alpha
        elif name == "hss":
            values[name] = hss_witness(t, env1)[0]
        elif name == "trace_dist":
            values[name] = blp_witness(t, env1)[0]
        else:
            measure, which = name.rsplit("_", 1)
            rho = snap.rho_ch if which == "ch" else rho_out
            fn = {"concurrence": concurrence_x, "discord": discord_x, "coherence": coherence_l1}[measure]
            values[name] = fn(rho)
    for k, v in values.items():
        if not math.isfinite(v):
            raise ArithmeticError(f"{k} is not finite")
    return values, ";".join(flags), ""


def _grid(cfg: SweepConfig) -> Iterator[tuple[tuple, float, dict]]:
    axes = [ax.values() for ax in cfg.swept]
    base = dict(DEFAULTS)
    base.update(cfg.fixed)
    for coords in itertools.product(*axes):
        params = dict(base)
        for ax, v in zip(cfg.swept, coords):
            params[ax.name] = float(v)
        for k, target in cfg.ties.items():
            params[k] = params[target]
        for t in cfg.times():
            yield tuple(float(c) for c in coords), float(t), params


def _point(args, outputs) -> ResultRow:
    coords, t, params = args
    try:
        values, flag, err = _evaluate(params, t, outputs)
    except (ArithmeticError, ValueError) as exc:
        return ResultRow(coords, t, {}, "", f"{type(exc).__name__}: {exc}")
    return ResultRow(coords, t, values, flag, err)


def run_sweep(cfg: SweepConfig, threads: int = 1) -> Iterator[ResultRow]:
    """Evaluate every grid point, yielding rows in lexicographic (axes, time) order.

    Per-point failures are recorded in the row's ``error`` field; the sweep
    always runs to completion.
    """
    cfg.validate()
    outputs = tuple(cfg.outputs)
    points = _grid(cfg)
    if threads <= 1:
        for p in points:
            yield _point(p, outputs)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(lambda p: _point(p, outputs), points)


def _fmt(x) -> str:
    return repr(float(x))


def _row_cells(row: ResultRow, outputs) -> list[str]:
    cells = [_fmt(c) for c in row.coords] + [_fmt(row.t)]
    cells += [_fmt(row.values[o]) if o in row.values else "" for o in outputs]
    return cells + [row.flag, row.error]


def _meta_lines(cfg: SweepConfig, extra: Optional[dict] = None) -> list[str]:
    lines = [f"topoteleport {__version__}", f"config-sha256 {config_hash(cfg)}"]
    for k in sorted(extra or {}):
        lines.append(f"{k} {extra[k]}")
    return lines


def write_csv(rows: Iterable[ResultRow], cfg: SweepConfig, fh: io.TextIOBase,
              meta: Optional[dict] = None) -> int:
    """Write rows as CSV with a ``#`` metadata header; returns the error-row count."""
    for line in _meta_lines(cfg, meta):
        fh.write(f"# {line}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns(cfg))
    errors = 0
    for row in rows:
        errors += bool(row.error)
        writer.writerow(_row_cells(row, cfg.outputs))
    return errors


def write_json(rows: Iterable[ResultRow], cfg: SweepConfig, fh: io.TextIOBase,
               meta: Optional[dict] = None) -> int:
    errors = 0
    out_rows = []
    for row in rows:
        errors += bool(row.error)
        cells = list(row.coords) + [row.t] + [row.values.get(o) for o in cfg.outputs]
        out_rows.append(cells + [row.flag, row.error])
    doc = {
        "meta": {"version": __version__, "config_sha256": config_hash(cfg), **(meta or {})},
        "config": cfg.canonical(),
        "columns": columns(cfg),
        "rows": out_rows,
    }
    json.dump(doc, fh, sort_keys=True, indent=1)
    fh.write("\n")
    return errors
