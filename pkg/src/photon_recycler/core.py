"""Cavity amplitude dynamics: single-pass and delayed-feedback two-pass capture.

The cavity starts in vacuum and is driven through up to two tunable ports.
Port 1 sees the input pulse directly; its reflection

    b_out(t) = b_in(t) - sqrt(kappa1(t)) a(t)

either leaves the system (single pass) or enters a delay line and returns to
port 2 after a transit time Delta t, attenuated in amplitude by
exp(-kappa_i Delta t / 2):

    b_in2(t) = exp(-kappa_i Delta t / 2) * b_out(t - Delta t)   for t >= Delta t.

Intrinsic loss kappa_i acts on the cavity as an extra decay -kappa_i a / 2
and on the delay line through the transmission factor above.  Every run
carries a cumulative energy ledger

    a^2 + e_out_cum + e_loss_cum + e_delay_inflight = e_in_cum

that closes to rounding error for any pulse, policy, and loss rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .policies import CouplingPolicy, POLICY_CODE, GREEDY
from .pulses import PulseSpec, SQUARE, EXP_DECAY


@dataclass(frozen=True)
class SimConfig:
    """Grid, horizon, delay and loss parameters of a run.

    The delay is snapped to the nearest integer multiple of dt on
    construction (the snapped value is what the ``delay`` field holds), and
    t_end is snapped to the nearest full step.
    """

    dt: float
    t_end: float
    delay: float = 0.0
    kappa_i: float = 0.0
    eps_a: float = 1e-12
    delay_snap: str = "snap_to_grid"

    def __post_init__(self) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if self.t_end < 0 or not math.isfinite(self.t_end):
            raise ValueError("t_end must be non-negative and finite")
        if self.delay < 0 or not math.isfinite(self.delay):
            raise ValueError("delay must be non-negative and finite")
        if self.kappa_i < 0 or not math.isfinite(self.kappa_i):
            raise ValueError("kappa_i must be non-negative and finite")
        if not (self.eps_a > 0):
            raise ValueError("eps_a must be positive")
        if self.delay_snap != "snap_to_grid":
            raise ValueError("delay_snap must be 'snap_to_grid'")
        m = int(round(self.delay / self.dt))
        object.__setattr__(self, "delay", m * self.dt)
        n = int(round(self.t_end / self.dt))
        object.__setattr__(self, "t_end", n * self.dt)

    @property
    def delay_steps(self) -> int:
        return int(round(self.delay / self.dt))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def with_(self, **changes) -> "SimConfig":
        params = dict(dt=self.dt, t_end=self.t_end, delay=self.delay,
                      kappa_i=self.kappa_i, eps_a=self.eps_a,
                      delay_snap=self.delay_snap)
        params.update(changes)
        return SimConfig(**params)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled record of one capture run.

    All arrays share the node grid t[i] = i * dt.  Couplings hold the value
    applied on the step starting at each node (the last entry is the
    controller evaluated at t_end, for reporting).  Cumulative energies are
    integrals from 0 to t[i].
    """

    t: np.ndarray
    a: np.ndarray
    a_sq: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    b_in: np.ndarray
    b_out: np.ndarray
    b_in2: np.ndarray
    b_out2: np.ndarray
    e_in_cum: np.ndarray
    e_out_cum: np.ndarray
    e_loss_cum: np.ndarray
    e_delay_inflight: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.t.size

    @property
    def final_a_sq(self) -> float:
        return float(self.a_sq[-1])

    @property
    def final_loss(self) -> float:
        return 1.0 - self.final_a_sq

    def ledger_residual(self) -> np.ndarray:
        """Pointwise ledger imbalance (should be ~0 everywhere)."""
        return (self.a_sq + self.e_out_cum + self.e_loss_cum
                + self.e_delay_inflight - self.e_in_cum)

    def ledger_violation(self) -> float:
        return float(np.max(np.abs(self.ledger_residual())))


@dataclass(frozen=True)
class LedgerSummary:
    e_in_total: float
    e_out_total: float
    e_loss_total: float
    e_inflight_final: float
    a_sq_final: float
    max_violation: float


def output_amplitude(b: float, kappa: float, a: float) -> float:
    """Port output b - sqrt(kappa) * a for input b against cavity amplitude a."""
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    return b - math.sqrt(kappa) * a


def energy_ledger(traj: Trajectory) -> LedgerSummary:
    """Totals of the run's energy bookkeeping plus its worst pointwise imbalance."""
    return LedgerSummary(
        e_in_total=float(traj.e_in_cum[-1]),
        e_out_total=float(traj.e_out_cum[-1]),
        e_loss_total=float(traj.e_loss_cum[-1]),
        e_inflight_final=float(traj.e_delay_inflight[-1]),
        a_sq_final=traj.final_a_sq,
        max_violation=traj.ledger_violation(),
    )


def first_pass_reflection_span(pulse: PulseSpec, policy: CouplingPolicy,
                               kappa_i: float) -> float:
    """Upper bound on how long the first pass keeps reflecting.

    Greedy control goes reflectionless once the capped regime ends, so for
    the analytic pulse shapes the span is the capped-regime exit time
    (clipped to the pulse support for square pulses).  Other policies can
    reflect for the whole pulse.
    """
    if policy.kind != GREEDY:
        return pulse.support()
    cap = policy.kappa_max
    if pulse.kind == SQUARE:
        k = cap / pulse.b_max**2          # in units of b_max^2
        ki = kappa_i / pulse.b_max**2
        if k <= ki:
            return pulse.duration
        t1 = (2.0 / (k + ki)) * math.log(2.0 * k / (k - ki)) / pulse.b_max**2
        return min(t1, pulse.duration)
    if pulse.kind == EXP_DECAY:
        g = pulse.gamma
        d = (cap + kappa_i) / g - 1.0
        s = (cap - kappa_i) / g + 1.0
        if s <= 0:
            return pulse.support()
        if abs(d) < 1e-9:
            return (2.0 / s) / g
        return (2.0 * math.log1p(d / s) / d) / g
    return pulse.support()


def _run(pulse: PulseSpec, policy1: CouplingPolicy, policy2: CouplingPolicy | None,
         config: SimConfig) -> Trajectory:
    n = config.n_steps
    dt = config.dt
    two_pass = policy2 is not None
    m = config.delay_steps if two_pass else 0
    atten = math.exp(-0.5 * config.kappa_i * config.delay) if two_pass else 1.0

    bin_half, bin_left = pulse.amplitude_step_samples(dt, n)
    bin_half = np.ascontiguousarray(bin_half)
    bin_left = np.ascontiguousarray(bin_left)
    p1_table = np.ascontiguousarray(policy1.per_step_values(dt, n))
    if two_pass:
        p2_kind = POLICY_CODE[policy2.kind]
        p2_cap = policy2.kappa_max
        p2_table = np.ascontiguousarray(policy2.per_step_values(dt, n))
    else:
        p2_kind, p2_cap, p2_table = 0, 0.0, np.empty(0)

    a_n = np.empty(n + 1)
    k1_n = np.empty(n + 1)
    k2_n = np.zeros(n + 1)
    bout_h = np.zeros(2 * n + 1)
    bout_left = np.zeros(n + 1)
    binp_n = np.zeros(n + 1)
    bout2_n = np.zeros(n + 1)
    e_in = np.empty(n + 1)
    e_out = np.empty(n + 1)
    e_loss = np.empty(n + 1)
    e_fl = np.empty(n + 1)

    status = _kernel.run_capture(
        dt, n, config.kappa_i, config.eps_a,
        bin_half, bin_left,
        POLICY_CODE[policy1.kind], policy1.kappa_max, p1_table,
        p2_kind, p2_cap, p2_table,
        two_pass, m, atten,
        a_n, k1_n, k2_n, bout_h, bout_left, binp_n, bout2_n,
        e_in, e_out, e_loss, e_fl)
    if status != _kernel.STATUS_OK:
        raise RuntimeError(
            f"non-finite cavity amplitude at step {status} (t = {status * dt:.6g}); "
            "check coupling magnitudes against the time step")

    arrays = (np.arange(n + 1) * dt, a_n, a_n**2, k1_n, k2_n,
              bin_half[0::2].copy(), bout_h[0::2].copy(), binp_n, bout2_n,
              e_in, e_out, e_loss, e_fl)
    for arr in arrays:
        arr.setflags(write=False)   # trajectories are immutable once produced
    (t_nodes, a_nodes, a_sq, kappa1, kappa2, b_in, b_out,
     b_in2, b_out2, e_in, e_out, e_loss, e_fl) = arrays

    meta = {
        "pulse": pulse.kind,
        "two_pass": two_pass,
        "dt": dt,
        "t_end": config.t_end,
        "delay": config.delay if two_pass else 0.0,
        "kappa_i": config.kappa_i,
        "policy1": policy1.kind,
        "kappa1_max": policy1.kappa_max,
        "policy2": policy2.kind if two_pass else "",
        "kappa2_max": policy2.kappa_max if two_pass else 0.0,
    }
    return Trajectory(
        t=t_nodes,
        a=a_nodes,
        a_sq=a_sq,
        kappa1=kappa1,
        kappa2=kappa2,
        b_in=b_in,
        b_out=b_out,
        b_in2=b_in2,
        b_out2=b_out2,
        e_in_cum=e_in,
        e_out_cum=e_out,
        e_loss_cum=e_loss,
        e_delay_inflight=e_fl,
        meta=meta,
    )


def simulate_single_pass(pulse: PulseSpec, policy: CouplingPolicy,
                         config: SimConfig) -> Trajectory:
    """Integrate port-1-only capture; the reflection leaves the system."""
    return _run(pulse, policy, None, config)


def simulate_two_pass(pulse: PulseSpec, policy1: CouplingPolicy,
                      policy2: CouplingPolicy, config: SimConfig) -> Trajectory:
    """Integrate capture with the port-1 reflection recycled into port 2.

    Rejects delays that leave no room for the recycled reflection inside the
    horizon: the delay plus the first-pass reflection span must not exceed
    t_end (spans are only known for finite-support pulses or greedy control;
    otherwise only delay < t_end is enforced).
    """
    if config.delay >= config.t_end and config.n_steps > 0:
        raise ValueError("delay must be smaller than t_end")
    span = first_pass_reflection_span(pulse, policy1, config.kappa_i)
    if math.isfinite(span) and config.delay + span > config.t_end + config.dt / 2:
        raise ValueError(
            f"delay {config.delay:.6g} plus reflection span {span:.6g} exceeds "
            f"t_end {config.t_end:.6g}; the recycled reflection cannot return in time")
    return _run(pulse, policy1, policy2, config)
