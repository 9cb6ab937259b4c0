"""Protocol parameter selection: delays, stop times, and the greedy schedule.

The greedy coupling itself lives in :mod:`photon_recycler.policies`; this
module picks the protocol-level numbers around it: the recapture delay for
exponential pulses (closed form), a numeric delay search for square pulses
(scan + verification runs), and the optimal decoupling times under intrinsic
loss.  "Stopping" means setting both couplings to zero at the stop time;
only intrinsic loss acts afterwards, so efficiency is evaluated at the stop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytic
from .analytic import InfeasibleProtocolError, select_delay_exp  # re-exported
from .core import SimConfig, simulate_single_pass, simulate_two_pass
from .policies import CouplingPolicy, greedy_coupling  # noqa: F401  (re-export)
from .pulses import PulseSpec

REFLECTIONLESS_TOL = 1e-9
INFLIGHT_TOL = 1e-12


def snap_delay_up(delay: float, dt: float) -> float:
    """Smallest grid multiple of dt not below delay.

    Analytic delays mark the earliest feasible recapture instant; rounding
    them down would leave the second port momentarily capped, so grid
    snapping for simulation goes upward.
    """
    return math.ceil(delay / dt - 1e-9) * dt


@dataclass(frozen=True)
class ProtocolParams:
    """Times defining one capture protocol (normalized units)."""

    delay: float | None
    t1: float
    T1: float | None
    T2: float | None
    early_capture: bool = False
    unbounded_stop: bool = False

    def __post_init__(self) -> None:
        if self.t1 < 0:
            raise ValueError("t1 must be non-negative")
        if (self.delay is not None and self.delay < self.t1
                and not self.early_capture):
            raise ValueError("delay below t1 requires the early-capture flag")


def stop_times(kappa1_max: float, kappa2_max: float, kappa_i: float) -> tuple[float, float]:
    """Optimal decoupling times (T1 single-pass, T2 two-pass).

    kappa_i = 0 has no finite optimum (capture forever); both times are
    reported unbounded as +inf.  kappa2_max does not enter either formula
    but is kept for signature symmetry with the delay selectors.
    """
    del kappa2_max
    if kappa_i == 0.0:
        return math.inf, math.inf
    nm = analytic.noisy_metrics(kappa1_max, kappa1_max, kappa_i)
    T2 = -math.log(kappa_i) / (1.0 - kappa_i)
    return nm.T1, T2


def exp_protocol(kappa1_max: float, kappa2_max: float,
                 kappa_i: float = 0.0) -> ProtocolParams:
    """Full parameter set for two-pass capture of the exp-decay pulse."""
    if kappa_i == 0.0:
        t1 = analytic.capped_exit_time_exp(kappa1_max)
        delay = analytic.select_delay_exp_noiseless(kappa1_max, kappa2_max)
        return ProtocolParams(delay, t1, None, None,
                              early_capture=delay < t1, unbounded_stop=True)
    nm = analytic.noisy_metrics(kappa1_max, kappa2_max, kappa_i)
    if not nm.feasible:
        raise InfeasibleProtocolError(
            f"no perfect-capture delay exists for caps ({kappa1_max:.6g}, "
            f"{kappa2_max:.6g}) at kappa_i={kappa_i:.6g}")
    return ProtocolParams(nm.delay, nm.t1, nm.T1, nm.T2,
                          early_capture=nm.delay < nm.t1)


@dataclass(frozen=True)
class SquareDelayResult:
    """Outcome of the numeric delay search for a square pulse.

    ``perfect`` runs satisfy max |b_out2| < 1e-9 with nothing left in the
    delay line at the end of the window; otherwise ``delay`` holds the best
    delay found on the scanned grid and ``loss`` its residual capture loss.
    """

    delay: float
    perfect: bool
    loss: float
    max_bout2: float


def _two_pass_loss(pulse: PulseSpec, k1: float, k2: float, config: SimConfig,
                   delay: float) -> tuple[float, float, float]:
    traj = simulate_two_pass(pulse, CouplingPolicy.greedy(k1),
                             CouplingPolicy.greedy(k2),
                             config.with_(delay=delay))
    return (traj.final_loss, float(np.max(np.abs(traj.b_out2))),
            float(traj.e_delay_inflight[-1]))


def select_delay_square(pulse: PulseSpec, kappa1_max: float, kappa2_max: float,
                        config: SimConfig) -> SquareDelayResult:
    """Smallest grid delay giving a reflectionless greedy second pass.

    The recapture condition binds at the window start, where the delayed
    reflection front (the full initial amplitude) meets the cavity, so
    candidate delays start at the first grid node with
    kappa2_max * a^2(t) >= b_max^2 e^{-kappa_i t} on the single-pass
    trajectory.  Each candidate is verified by an actual two-pass run; on
    failure the next grid node is tried.  If no candidate yields perfect
    capture inside the window, a deterministic coarse ladder of delays is
    scanned and the smallest residual loss is reported.
    """
    if pulse.kind != "square":
        raise ValueError("select_delay_square expects a square pulse")
    dt = config.dt
    sp = simulate_single_pass(pulse, CouplingPolicy.greedy(kappa1_max), config.with_(delay=0.0))

    # reflection span: last node still reflecting
    refl = np.abs(sp.b_out) > REFLECTIONLESS_TOL * pulse.b_max
    span = (int(np.max(np.nonzero(refl)[0])) + 1) * dt if refl.any() else dt

    front = (pulse.b_max**2) * np.exp(-config.kappa_i * sp.t)
    ok = kappa2_max * sp.a_sq >= front
    ok[0] = False                      # delay must be at least one step
    candidates = np.nonzero(ok)[0]

    latest = config.t_end - span       # recycled packet must return in-window
    if candidates.size:
        m0 = int(candidates[0])
        for m in range(m0, m0 + 50):
            delay = m * dt
            if delay > latest + dt / 2:
                break
            loss, mb2, inflight = _two_pass_loss(pulse, kappa1_max, kappa2_max,
                                                 config, delay)
            if mb2 < REFLECTIONLESS_TOL and inflight < INFLIGHT_TOL:
                return SquareDelayResult(delay, True, loss, mb2)

    # residual mode: deterministic coarse ladder, pick the smallest loss
    ladder = sorted({max(dt, round(x / dt) * dt)
                     for x in (span, 1.0 / pulse.b_max**2,
                               0.5 * (span + latest), latest)
                     if dt <= x <= latest + dt / 2})
    best: SquareDelayResult | None = None
    for delay in ladder:
        loss, mb2, inflight = _two_pass_loss(pulse, kappa1_max, kappa2_max,
                                             config, delay)
        if best is None or loss < best.loss:
            best = SquareDelayResult(delay, False, loss, mb2)
    if best is None:
        # window too short for any recycling: report the single-pass outcome
        best = SquareDelayResult(0.0, False, sp.final_loss,
                                 float(np.max(np.abs(sp.b_out))))
    return best
