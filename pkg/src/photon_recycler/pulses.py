"""Input photon pulse shapes.

All pulses are real, non-negative amplitude profiles b_in(t) carrying unit
energy, i.e. the integral of b_in(t)^2 over the pulse equals 1.  Three shapes
are supported:

* ``square``    -- constant amplitude b_max on the half-open window
                   [0, duration), with b_max^2 * duration = 1.
* ``exp_decay`` -- sqrt(gamma) * exp(-gamma t / 2), the emission profile of a
                   decaying source with rate gamma.
* ``tabulated`` -- arbitrary non-negative samples on a uniform time grid.

The simulator consumes pulses through :meth:`PulseSpec.amplitude_half_grid`,
which samples the amplitude on a half-step grid so the integrator sees exact
(or table-resolution) values at every internal stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

NORMALIZATION_TOL = 1e-9

SQUARE = "square"
EXP_DECAY = "exp_decay"
TABULATED = "tabulated"

_KINDS = (SQUARE, EXP_DECAY, TABULATED)


@dataclass(frozen=True, eq=False)
class PulseSpec:
    """A normalized input pulse.

    Use the classmethod constructors (:meth:`square`, :meth:`exp_decay`,
    :meth:`tabulated`) rather than filling fields by hand; they derive the
    dependent fields and validation then passes by construction.
    """

    kind: str
    b_max: float
    gamma: float | None = None
    duration: float | None = None
    samples: np.ndarray | None = field(default=None, repr=False)
    sample_step: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if not (self.b_max > 0 and math.isfinite(self.b_max)):
            raise ValueError("b_max must be positive and finite")
        if self.kind == SQUARE:
            if self.duration is None or self.duration <= 0:
                raise ValueError("square pulse needs a positive duration")
            energy = self.b_max**2 * self.duration
        elif self.kind == EXP_DECAY:
            if self.gamma is None or self.gamma <= 0:
                raise ValueError("exp_decay pulse needs a positive gamma")
            if abs(self.b_max - math.sqrt(self.gamma)) > NORMALIZATION_TOL:
                raise ValueError("exp_decay amplitude scale must be sqrt(gamma)")
            energy = 1.0  # integral of gamma * exp(-gamma t) over [0, inf)
        else:
            if self.samples is None or self.sample_step is None:
                raise ValueError("tabulated pulse needs samples and sample_step")
            if self.sample_step <= 0:
                raise ValueError("sample_step must be positive")
            table = np.ascontiguousarray(self.samples, dtype=np.float64)
            if table.ndim != 1 or table.size < 2:
                raise ValueError("samples must be a 1-D array of at least 2 points")
            if not np.all(np.isfinite(table)):
                raise ValueError("samples must be finite")
            if table.min() < 0.0:
                raise ValueError("pulse amplitudes must be non-negative")
            if table.max() > self.b_max * (1 + 1e-12):
                raise ValueError("samples exceed the declared b_max")
            table.setflags(write=False)
            object.__setattr__(self, "samples", table)
            energy = float(np.trapezoid(table**2, dx=self.sample_step))
        if abs(energy - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"pulse is not unit-energy: integral b^2 dt = {energy}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def square(cls, b_max: float = 1.0) -> "PulseSpec":
        """Unit-energy square pulse: amplitude b_max on [0, b_max**-2)."""
        return cls(kind=SQUARE, b_max=b_max, duration=1.0 / b_max**2)

    @classmethod
    def exp_decay(cls, gamma: float = 1.0) -> "PulseSpec":
        """Unit-energy exponential-decay pulse sqrt(gamma) e^{-gamma t/2}."""
        return cls(kind=EXP_DECAY, b_max=math.sqrt(gamma), gamma=gamma)

    @classmethod
    def tabulated(cls, samples: np.ndarray, step: float) -> "PulseSpec":
        """Pulse given by uniform-grid samples (trapezoid-normalized check)."""
        arr = np.asarray(samples, dtype=np.float64)
        return cls(kind=TABULATED, b_max=float(arr.max()), samples=arr, sample_step=step)

    @classmethod
    def tabulated_normalized(cls, samples: np.ndarray, step: float) -> "PulseSpec":
        """Like :meth:`tabulated` but rescales the table to unit energy first."""
        arr = np.asarray(samples, dtype=np.float64)
        norm = math.sqrt(float(np.trapezoid(arr**2, dx=step)))
        if norm <= 0:
            raise ValueError("cannot normalize an all-zero table")
        return cls.tabulated(arr / norm, step)

    # -- evaluation --------------------------------------------------------

    def support(self) -> float:
        """Length of the time interval on which the pulse can be non-zero."""
        if self.kind == SQUARE:
            return float(self.duration)
        if self.kind == TABULATED:
            return float((self.samples.size - 1) * self.sample_step)
        return math.inf

    def energy(self) -> float:
        if self.kind == TABULATED:
            return float(np.trapezoid(self.samples**2, dx=self.sample_step))
        return 1.0

    def amplitude_half_grid(self, dt: float, n_steps: int) -> np.ndarray:
        """Sample b_in at times k*dt/2 for k = 0 .. 2*n_steps.

        Square edges are resolved by integer index so the half-open support
        [0, duration) is exact on the grid.  Tabulated pulses whose step
        already equals dt or dt/2 are used verbatim; otherwise they are
        linearly interpolated (zero outside the table).
        """
        m = 2 * n_steps + 1
        if self.kind == SQUARE:
            out = np.zeros(m)
            h_cut = int(round(2.0 * self.duration / dt))
            out[: min(h_cut, m)] = self.b_max
            return out
        if self.kind == EXP_DECAY:
            t = np.arange(m) * (dt / 2.0)
            return self.b_max * np.exp(-0.5 * self.gamma * t)
        step = self.sample_step
        if abs(step - dt / 2.0) <= 1e-12 * dt:
            out = np.zeros(m)
            k = min(m, self.samples.size)
            out[:k] = self.samples[:k]
            return out
        t = np.arange(m) * (dt / 2.0)
        t_table = np.arange(self.samples.size) * step
        return np.interp(t, t_table, self.samples, left=0.0, right=0.0)

    def amplitude_step_samples(self, dt: float, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
        """Half-grid samples plus per-node left limits.

        The square pulse is discontinuous exactly on a node: the node sample
        is the right limit (0 at the closing edge, so the controller shuts
        the port), while the integrator and the energy quadrature need the
        left limit as the final stage of the preceding step.  For continuous
        pulses the left limits are just the node samples.
        """
        half = self.amplitude_half_grid(dt, n_steps)
        left = half[0::2].copy()
        if self.kind == SQUARE:
            i_cut = int(round(self.duration / dt))
            aligned = abs(i_cut * dt - self.duration) < 1e-9 * max(1.0, self.duration)
            if 0 < i_cut <= n_steps and aligned:
                left[i_cut] = self.b_max
        return half, left
