"""CSV and JSON emission with byte-stable, round-trippable formatting.

Floats are written as Python's shortest round-trip decimals, so re-parsing
an emitted file reproduces the in-memory values exactly.  Data files carry
no timestamps; identical inputs produce byte-identical files.

Trajectory CSV columns, in order:
    t, b_in, kappa1, a, a_sq, b_out, b_in2, kappa2, b_out2,
    e_in_cum, e_out_cum, e_loss_cum, e_delay_inflight
Heatmap CSV columns: kappa1_max, kappa2_max, loss, log10_loss
Metadata rides in leading comment lines of the form ``# key: value``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import Trajectory
from .sweep import LossGrid

TRAJECTORY_COLUMNS = ("t", "b_in", "kappa1", "a", "a_sq", "b_out", "b_in2",
                      "kappa2", "b_out2", "e_in_cum", "e_out_cum",
                      "e_loss_cum", "e_delay_inflight")
HEATMAP_COLUMNS = ("kappa1_max", "kappa2_max", "loss", "log10_loss")


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _units_line(pulse_kind: str) -> str:
    if pulse_kind == "square":
        return "# units: rates in b_max^2, time in 1/b_max^2"
    return "# units: rates in gamma, time in 1/gamma"


def _meta_lines(meta: dict) -> list[str]:
    return [f"# {key}: {_fmt(value)}" for key, value in meta.items()]


def _parse_meta(lines: list[str]) -> dict:
    meta: dict = {}
    for line in lines:
        body = line[1:].strip()
        if body.startswith("units:") or ":" not in body:
            continue
        key, value = body.split(":", 1)
        value = value.strip()
        try:
            parsed: object = int(value)
        except ValueError:
            try:
                parsed = float(value)
            except ValueError:
                parsed = {"True": True, "False": False}.get(value, value)
        meta[key.strip()] = parsed
    return meta


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    columns = (traj.t, traj.b_in, traj.kappa1, traj.a, traj.a_sq, traj.b_out,
               traj.b_in2, traj.kappa2, traj.b_out2, traj.e_in_cum,
               traj.e_out_cum, traj.e_loss_cum, traj.e_delay_inflight)
    lines = [_units_line(traj.meta.get("pulse", ""))]
    lines += _meta_lines(traj.meta)
    lines.append(",".join(TRAJECTORY_COLUMNS))
    for row in zip(*columns):
        lines.append(",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trajectory_csv(path: str | Path) -> tuple[dict, dict]:
    """Read back a trajectory CSV as (meta, column arrays)."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    comments = [ln for ln in text if ln.startswith("#")]
    rows = [ln for ln in text if ln and not ln.startswith("#")]
    header = tuple(rows[0].split(","))
    if header != TRAJECTORY_COLUMNS:
        raise ValueError(f"unexpected trajectory header {header}")
    data = np.array([[float(v) for v in ln.split(",")] for ln in rows[1:]])
    columns = {name: data[:, i] for i, name in enumerate(TRAJECTORY_COLUMNS)}
    return _parse_meta(comments), columns


def write_heatmap_csv(grid: LossGrid, path: str | Path) -> None:
    lines = [_units_line(grid.meta.get("pulse", ""))]
    lines += _meta_lines(grid.meta)
    for note in grid.diagnostics:
        lines.append(f"# diagnostic: {note}")
    lines.append(",".join(HEATMAP_COLUMNS))
    log_loss = grid.log10_loss
    for i, k1 in enumerate(grid.kappa1_axis):
        for j, k2 in enumerate(grid.kappa2_axis):
            lines.append(",".join((repr(float(k1)), repr(float(k2)),
                                   repr(float(grid.loss[i, j])),
                                   repr(float(log_loss[i, j])))))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_heatmap_csv(path: str | Path) -> tuple[dict, dict]:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    comments = [ln for ln in text if ln.startswith("#")]
    rows = [ln for ln in text if ln and not ln.startswith("#")]
    header = tuple(rows[0].split(","))
    if header != HEATMAP_COLUMNS:
        raise ValueError(f"unexpected heatmap header {header}")
    data = np.array([[float(v) for v in ln.split(",")] for ln in rows[1:]])
    columns = {name: data[:, i] for i, name in enumerate(HEATMAP_COLUMNS)}
    return _parse_meta(comments), columns


def write_report_json(report_dict: dict, path: str | Path | None) -> str:
    text = json.dumps(report_dict, indent=2, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_report_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
