"""Data behind each published figure, as CSV plus a JSON manifest."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .sweep import DEFAULTS, Axis, SweepConfig, config_hash, run_sweep, write_csv, write_json

__all__ = ["FIGURES", "FigureSpec", "figure_config", "reproduce_figure", "UnknownFigureError"]


class UnknownFigureError(KeyError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    description: str
    swept: tuple
    outputs: tuple
    time_grid: tuple = (0.0, 5.0, 101)
    fixed: dict = field(default_factory=dict)
    ties: dict = field(default_factory=dict)
    # where each pinned value comes from: "published" or "chosen"
    sources: dict = field(default_factory=dict)


FIGURES = {
    "fig1a": FigureSpec(
        "QFI for B1 versus t for several Ohmicities Q2",
        swept=(Axis("Q2", 1.0, 4.0, 4),), outputs=("qfi",),
    ),
    "fig1b": FigureSpec(
        "QFI for B1 versus t for several cutoffs gamma2",
        swept=(Axis("gamma2", 1.0, 4.0, 4),), outputs=("qfi",),
    ),
    "conB2": FigureSpec(
        "concurrence of the teleported pair versus t for several fields B2",
        swept=(Axis("B2", 0.25, 1.0, 4),), outputs=("concurrence_out",),
    ),
    "conQ2": FigureSpec(
        "concurrence of the teleported pair versus Q1 for several Q2 at t = 0.7",
        swept=(Axis("Q2", 1.0, 4.0, 4), Axis("Q1", 0.0, 6.0, 61)),
        outputs=("concurrence_out",), time_grid=(0.7, 0.7, 1), sources={"t": "published"},
    ),
    "conG2": FigureSpec(
        "concurrence of the teleported pair versus gamma1 for several gamma2 at t = 1.1",
        swept=(Axis("gamma2", 1.0, 4.0, 4), Axis("gamma1", 0.1, 5.0, 50)),
        outputs=("concurrence_out",), time_grid=(1.1, 1.1, 1), sources={"t": "published"},
    ),
    "FQ": FigureSpec(
        "average fidelity versus t with Q1 = Q2 raised together",
        swept=(Axis("Q2", 1.0, 4.0, 4),), ties={"Q1": "Q2"}, outputs=("f_avg",),
    ),
    "FG": FigureSpec(
        "average fidelity versus t for several cutoffs gamma2",
        swept=(Axis("gamma2", 1.0, 4.0, 4),), outputs=("f_avg",),
    ),
    "comparison": FigureSpec(
        "average fidelity against channel and output resources versus t",
        swept=(),
        outputs=(
            "f_avg", "concurrence_ch", "concurrence_out", "discord_ch", "discord_out",
            "coherence_ch", "coherence_out",
        ),
        time_grid=(0.0, 10.0, 201),
        # Q = 6 keeps alpha1 * alpha2 above the sudden-death point while it
        # still revives, so the curves have interior extrema to compare.
        fixed={"Q1": 6.0, "Q2": 6.0},
        sources={"Q1": "chosen", "Q2": "chosen"},
    ),
}


def figure_config(name: str, overrides: Optional[dict] = None) -> tuple[SweepConfig, dict]:
    """Build the sweep for figure ``name`` and the provenance of every parameter.

    ``overrides`` may fix any model parameter, ``t`` (a single time) or
    ``time`` (a ``(start, stop, n)`` grid).  Overriding a swept parameter
    removes that axis.
    """
    if name not in FIGURES:
        raise UnknownFigureError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    spec = FIGURES[name]
    overrides = dict(overrides or {})
    time_grid = spec.time_grid
    time_source = spec.sources.get("t", "default")
    if "t" in overrides:
        t = float(overrides.pop("t"))
        time_grid, time_source = (t, t, 1), "override"
    if "time" in overrides:
        t0, t1, n = overrides.pop("time")
        time_grid, time_source = (float(t0), float(t1), int(n)), "override"

    swept = [ax for ax in spec.swept if ax.name not in overrides]
    swept_names = {ax.name for ax in swept}
    ties = {k: v for k, v in spec.ties.items() if v in swept_names and k not in overrides}
    fixed = {k: v for k, v in spec.fixed.items() if k not in swept_names}
    for k, target in spec.ties.items():
        if k not in ties and k not in overrides and target in overrides:
            fixed[k] = float(overrides[target])
    fixed.update({k: float(v) for k, v in overrides.items()})
    cfg = SweepConfig(fixed=fixed, swept=swept, outputs=spec.outputs,
                      time_grid=time_grid, ties=ties).validate()

    provenance = {}
    for p, default in DEFAULTS.items():
        if p in swept_names:
            ax = next(a for a in swept if a.name == p)
            provenance[p] = {"source": "swept", "start": ax.start, "stop": ax.stop, "count": ax.count}
        elif p in ties:
            provenance[p] = {"source": "tied", "follows": ties[p]}
        elif p in overrides:
            provenance[p] = {"source": "override", "value": fixed[p]}
        elif p in fixed:
            provenance[p] = {"source": spec.sources.get(p, "figure"), "value": fixed[p]}
        else:
            provenance[p] = {"source": "default", "value": default, "defaulted": True}
    provenance["t"] = {"source": time_source, "start": time_grid[0], "stop": time_grid[1],
                       "count": time_grid[2], "defaulted": time_source == "default"}
    return cfg, provenance


def reproduce_figure(name: str, overrides: Optional[dict] = None, out_dir=".",
                     threads: int = 1, fmt: str = "csv") -> tuple[list[Path], int]:
    """Write the data file and manifest for one figure.

    Returns the written paths and the number of rows carrying an error.
    """
    cfg, provenance = figure_config(name, overrides)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data_path = out / f"{name}.{fmt}"
    writer = {"csv": write_csv, "json": write_json}[fmt]
    with open(data_path, "w", encoding="utf-8", newline="") as fh:
        errors = writer(run_sweep(cfg, threads=threads), cfg, fh, meta={"figure": name})
    manifest = {
        "figure": name,
        "description": FIGURES[name].description,
        "version": __version__,
        "config_sha256": config_hash(cfg),
        "config": cfg.canonical(),
        "parameters": provenance,
        "files": [data_path.name],
        "error_rows": errors,
    }
    manifest_path = out / f"{name}.manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return [data_path, manifest_path], errors
