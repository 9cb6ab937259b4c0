"""Loss landscapes over the (kappa1_max, kappa2_max) plane.

Each cell runs greedy two-pass capture with the module-selected delay
(closed form for exponential pulses, numeric scan for square pulses) and
records the final capture loss 1 - a^2.  Cells are independent work items
evaluated into pre-assigned slots, so grids are bit-identical regardless of
the degree of parallelism.  Cells whose coarse loss drops below a refinement
threshold are re-run at a finer step; those confirmed below it are recorded
as exactly zero (true perfect capture, separated from the numerical floor).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analytic, control
from .core import SimConfig, simulate_two_pass
from .policies import CouplingPolicy
from .pulses import PulseSpec

LOG10_FLOOR = 1e-12
PERFECT_LOSS = 1e-6
REFINE_DT = 1e-4

THREADS_ENV = "PHOTON_RECYCLER_THREADS"


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced axes for the coupling-cap sweep."""

    kappa_min: float = 0.2
    kappa_max: float = 6.0
    points: int = 60

    def axis(self) -> np.ndarray:
        if not (0 < self.kappa_min < self.kappa_max) or self.points < 2:
            raise ValueError("grid axes must be positive, ordered, with >= 2 points")
        return np.geomspace(self.kappa_min, self.kappa_max, self.points)


@dataclass(frozen=True, eq=False)
class LossGrid:
    kappa1_axis: np.ndarray
    kappa2_axis: np.ndarray
    loss: np.ndarray                  # loss[i, j] for (kappa1_axis[i], kappa2_axis[j])
    meta: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    @property
    def log10_loss(self) -> np.ndarray:
        return np.log10(np.maximum(self.loss, LOG10_FLOOR))


@dataclass(frozen=True)
class BoundaryCurve:
    kappa1: np.ndarray
    kappa2_boundary: np.ndarray       # NaN where the column never crosses
    unbounded: list


def _cell_square(k1: float, k2: float, pulse: PulseSpec, config: SimConfig) -> float:
    res = control.select_delay_square(pulse, k1, k2, config)
    if res.perfect:
        fine = control.select_delay_square(pulse, k1, k2, config.with_(dt=REFINE_DT))
        return 0.0 if fine.loss < PERFECT_LOSS else fine.loss
    if res.loss < PERFECT_LOSS:       # coarse-grid floor without a perfect delay
        fine = control.select_delay_square(pulse, k1, k2, config.with_(dt=REFINE_DT))
        return 0.0 if fine.perfect and fine.loss < PERFECT_LOSS else fine.loss
    return res.loss


def _exp_loss_at(k1: float, k2: float, delay: float, config: SimConfig) -> float:
    traj = simulate_two_pass(PulseSpec.exp_decay(), CouplingPolicy.greedy(k1),
                             CouplingPolicy.greedy(k2), config.with_(delay=delay))
    return traj.final_loss


def _cell_exp(k1: float, k2: float, config: SimConfig) -> float:
    t1 = analytic.capped_exit_time_exp(k1, config.kappa_i)
    try:
        if config.kappa_i == 0.0:
            delay = analytic.select_delay_exp_noiseless(k1, k2)
        else:
            delay = analytic.select_delay_exp(k1, k2, config.kappa_i)
        feasible = True
    except analytic.InfeasibleProtocolError:
        feasible = False

    latest = min(config.t_end - t1 - 5.0, 30.0 - t1)
    if feasible:
        # an early-capture delay below t1 is valid analytically but the
        # closed form for a(t) it solved is the post-t1 branch; waiting
        # until t1 keeps the second pass reflectionless with margin
        use = min(max(delay, t1), max(latest, t1))
        use = control.snap_delay_up(use, config.dt)
        loss = _exp_loss_at(k1, k2, use, config)
        if loss < PERFECT_LOSS:
            fine = _exp_loss_at(k1, k2, use, config.with_(dt=REFINE_DT))
            return 0.0 if fine < PERFECT_LOSS else fine
        return loss

    best = math.inf
    for extra in (0.5, 2.0, 8.0):
        delay = t1 + extra
        if delay > latest:
            continue
        best = min(best, _exp_loss_at(k1, k2, control.snap_delay_up(delay, config.dt),
                                      config))
    if math.isinf(best):
        best = _exp_loss_at(k1, k2, control.snap_delay_up(t1, config.dt), config)
    return best


def _thread_count(requested: int | None) -> int:
    n = requested if requested and requested > 0 else min(4, os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


def loss_grid(pulse_kind: str, grid: GridSpec, config: SimConfig,
              threads: int | None = None, grid2: GridSpec | None = None) -> LossGrid:
    """Greedy two-pass capture loss over the cap plane.

    Square cells measure the loss at the end of the 2 / b_max^2 window;
    exponential cells at the asymptotic horizon in config.t_end.  Both axes
    follow ``grid`` unless a separate ``grid2`` is given for the second cap.
    Cell failures are recorded as NaN with a diagnostic entry, and the grid
    is still returned.
    """
    if pulse_kind not in ("square", "exp_decay"):
        raise ValueError(f"unknown pulse kind {pulse_kind!r}")
    axis1 = grid.axis()
    axis2 = (grid2 or grid).axis()
    loss = np.full((axis1.size, axis2.size), np.nan)
    diagnostics: list[str] = []
    pulse = PulseSpec.square() if pulse_kind == "square" else PulseSpec.exp_decay()

    def cell(i: int, j: int) -> float:
        try:
            if pulse_kind == "square":
                return _cell_square(float(axis1[i]), float(axis2[j]), pulse, config)
            return _cell_exp(float(axis1[i]), float(axis2[j]), config)
        except Exception as exc:
            diagnostics.append(
                f"cell ({i},{j}) kappa1={axis1[i]:.6g} kappa2={axis2[j]:.6g}: {exc}")
            return math.nan

    indices = [(i, j) for i in range(axis1.size) for j in range(axis2.size)]
    n_threads = _thread_count(threads)
    if n_threads == 1:
        for i, j in indices:
            loss[i, j] = cell(i, j)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            for (i, j), value in zip(indices,
                                     pool.map(lambda ij: cell(*ij), indices)):
                loss[i, j] = value
    diagnostics.sort()

    meta = {"pulse": pulse_kind, "dt": config.dt, "t_end": config.t_end,
            "kappa_i": config.kappa_i, "delay_policy": "module-control minimal delay"}
    return LossGrid(axis1, axis2, loss, meta, diagnostics)


def boundary_extract(grid: LossGrid, threshold: float) -> BoundaryCurve:
    """Per kappa1 column, the smallest kappa2 whose loss falls below threshold.

    Linear interpolation in loss between the bracketing cells; columns that
    never cross are NaN and listed in ``unbounded``.
    """
    if not (0.0 < threshold < 1.0):
        raise ValueError("threshold must lie in (0, 1)")
    k1 = grid.kappa1_axis
    k2 = grid.kappa2_axis
    out = np.full(k1.size, np.nan)
    unbounded: list[int] = []
    for i in range(k1.size):
        column = grid.loss[i]
        below = np.nonzero(column < threshold)[0]
        if below.size == 0:
            unbounded.append(i)
            continue
        j = int(below[0])
        if j == 0:
            out[i] = k2[0]
            continue
        l_hi, l_lo = column[j - 1], column[j]
        frac = (l_hi - threshold) / (l_hi - l_lo) if l_hi != l_lo else 1.0
        out[i] = k2[j - 1] + frac * (k2[j] - k2[j - 1])
    return BoundaryCurve(k1, out, unbounded)
