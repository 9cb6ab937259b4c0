"""Tunable-coupling policies for the cavity ports.

A policy produces the coupling rate kappa(t) applied to one port, always
within [0, kappa_max].  Three kinds:

* ``constant``  -- kappa(t) = kappa_max.
* ``greedy``    -- reflection elimination: kappa = min(kappa_max, (b/a)^2),
                   which zeroes the port reflection b - sqrt(kappa) a whenever
                   the cap allows, and saturates the cap otherwise.
* ``tabulated`` -- a prescribed kappa(t) table on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CONSTANT = "constant"
GREEDY = "greedy"
TABULATED = "tabulated"

_KINDS = (CONSTANT, GREEDY, TABULATED)

# integer codes consumed by the compiled stepping kernel
POLICY_CODE = {CONSTANT: 0, GREEDY: 1, TABULATED: 2}


def greedy_coupling(b: float, a: float, kappa_max: float, eps_a: float = 1e-12) -> float:
    """Reflection-eliminating coupling min(kappa_max, (b/a)^2).

    Near-vacuum amplitudes (|a| <= eps_a) map to kappa_max, matching the
    limit of the min formula as a -> 0+.  A silent port (b = 0 with a > eps_a)
    returns 0.  The result is always in [0, kappa_max].
    """
    if kappa_max <= 0:
        raise ValueError("kappa_max must be positive")
    if abs(a) <= eps_a:
        return kappa_max
    r = b / a
    return min(kappa_max, r * r)


@dataclass(frozen=True, eq=False)
class CouplingPolicy:
    kind: str
    kappa_max: float
    table: np.ndarray | None = field(default=None, repr=False)
    table_step: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kappa_max < 0 or not math.isfinite(self.kappa_max):
            raise ValueError("kappa_max must be finite and non-negative")
        if self.kind == GREEDY and self.kappa_max == 0:
            raise ValueError("greedy policy needs kappa_max > 0")
        if self.kind == TABULATED:
            if self.table is None or self.table_step is None or self.table_step <= 0:
                raise ValueError("tabulated policy needs table and positive table_step")
            tab = np.ascontiguousarray(self.table, dtype=np.float64)
            if tab.ndim != 1 or tab.size < 2:
                raise ValueError("table must be a 1-D array of at least 2 points")
            if not np.all(np.isfinite(tab)):
                raise ValueError("table must be finite")
            if tab.min() < 0 or tab.max() > self.kappa_max * (1 + 1e-12):
                raise ValueError("table values must lie in [0, kappa_max]")
            tab.setflags(write=False)
            object.__setattr__(self, "table", tab)

    @classmethod
    def constant(cls, kappa_max: float) -> "CouplingPolicy":
        return cls(kind=CONSTANT, kappa_max=kappa_max)

    @classmethod
    def greedy(cls, kappa_max: float) -> "CouplingPolicy":
        return cls(kind=GREEDY, kappa_max=kappa_max)

    @classmethod
    def tabulated(cls, table: np.ndarray, step: float,
                  kappa_max: float | None = None) -> "CouplingPolicy":
        arr = np.asarray(table, dtype=np.float64)
        cap = float(arr.max()) if kappa_max is None else kappa_max
        return cls(kind=TABULATED, kappa_max=cap, table=arr, table_step=step)

    def per_step_values(self, dt: float, n_steps: int) -> np.ndarray:
        """Coupling applied on each step [i dt, (i+1) dt), plus a final entry.

        Tabulated profiles are sampled at step midpoints (second-order
        accurate under the per-step zero-order hold); the trailing entry is
        the endpoint value, used only for reporting at t_end.  Constant and
        greedy policies do not use this table.
        """
        if self.kind != TABULATED:
            return np.empty(0)
        t_table = np.arange(self.table.size) * self.table_step
        t_mid = (np.arange(n_steps) + 0.5) * dt
        vals = np.interp(t_mid, t_table, self.table, left=self.table[0], right=self.table[-1])
        t_last = min(n_steps * dt, t_table[-1])
        last = np.interp(t_last, t_table, self.table)
        return np.clip(np.append(vals, last), 0.0, self.kappa_max)
