"""Cross-validation of every closed form against the numerical dynamics.

Each case simulates greedy capture and compares the measured efficiency (or
loss) with the corresponding closed-form value at a stated tolerance.  Used
by the ``validate`` CLI command and by the acceptance suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import analytic
from .core import SimConfig, simulate_single_pass, simulate_two_pass
from .policies import CouplingPolicy
from .pulses import PulseSpec

DEFAULT_KAPPAS = (0.5, 1.5, 2.0, 3.0, 6.0)
DEFAULT_KAPPA_IS = (0.0, 0.001)
AGREEMENT_TOL = 1e-3
EXP_HORIZON = 40.0


@dataclass(frozen=True)
class ValidationRow:
    label: str
    measured: float
    reference: float
    tolerance: float

    @property
    def deviation(self) -> float:
        return abs(self.measured - self.reference)

    @property
    def passed(self) -> bool:
        return self.deviation < self.tolerance


def _single_pass_eff(pulse: PulseSpec, kappa: float, kappa_i: float,
                     t_end: float, dt: float) -> float:
    config = SimConfig(dt=dt, t_end=t_end, kappa_i=kappa_i)
    traj = simulate_single_pass(pulse, CouplingPolicy.greedy(kappa), config)
    return traj.final_a_sq


def single_pass_cases(kappas=DEFAULT_KAPPAS, kappa_is=DEFAULT_KAPPA_IS,
                      dt: float = 1e-4) -> list[ValidationRow]:
    """Greedy single-pass efficiency vs closed form for both pulse shapes."""
    rows = []
    for kappa_i in kappa_is:
        for kappa in kappas:
            sm = analytic.square_metrics(kappa, kappa_i)
            eff = _single_pass_eff(PulseSpec.square(), kappa, kappa_i, 1.0, dt)
            rows.append(ValidationRow(
                f"square kappa={kappa:g} kappa_i={kappa_i:g}",
                eff, sm.eff_first_pass, AGREEMENT_TOL))
            if kappa_i == 0.0:
                ref = analytic.exp_metrics(kappa).eff_infinity
                t_end = EXP_HORIZON
            else:
                nm = analytic.noisy_metrics(kappa, kappa, kappa_i)
                ref = nm.eff1
                t_end = nm.T1
            eff = _single_pass_eff(PulseSpec.exp_decay(), kappa, kappa_i, t_end, dt)
            rows.append(ValidationRow(
                f"exp kappa={kappa:g} kappa_i={kappa_i:g}",
                eff, ref, AGREEMENT_TOL))
    return rows


def two_pass_cases(dt: float = 1e-4) -> list[ValidationRow]:
    """Benchmark two-pass runs against their closed-form outcomes."""
    rows = []

    from .control import select_delay_square, snap_delay_up

    delay = snap_delay_up(analytic.select_delay_exp(2.0, 2.0, 0.0), dt)
    traj = simulate_two_pass(PulseSpec.exp_decay(), CouplingPolicy.greedy(2.0),
                             CouplingPolicy.greedy(2.0),
                             SimConfig(dt=dt, t_end=EXP_HORIZON, delay=delay))
    rows.append(ValidationRow("exp two-pass kappa=2 perfect-capture loss",
                              traj.final_loss, 0.0, 1e-5))

    nm = analytic.noisy_metrics(1.5, 1.5, 0.001)
    traj = simulate_two_pass(PulseSpec.exp_decay(), CouplingPolicy.greedy(1.5),
                             CouplingPolicy.greedy(1.5),
                             SimConfig(dt=dt, t_end=nm.T2,
                                       delay=snap_delay_up(nm.delay, dt),
                                       kappa_i=0.001))
    rows.append(ValidationRow("exp two-pass kappa=1.5 kappa_i=0.001 ceiling",
                              traj.final_a_sq, nm.eff2, AGREEMENT_TOL))

    pulse = PulseSpec.square()
    config = SimConfig(dt=dt, t_end=2.0)
    res = select_delay_square(pulse, 1.5, 1.5, config)
    rows.append(ValidationRow("square two-pass kappa=1.5 perfect-capture loss",
                              res.loss if res.perfect else 1.0, 0.0, 1e-5))
    return rows


def run_validation(kappas=DEFAULT_KAPPAS, kappa_is=DEFAULT_KAPPA_IS,
                   dt: float = 1e-4, include_two_pass: bool = True) -> list[ValidationRow]:
    rows = single_pass_cases(kappas, kappa_is, dt)
    if include_two_pass:
        rows += two_pass_cases(dt)
    return rows


def format_table(rows: list[ValidationRow]) -> str:
    width = max(len(r.label) for r in rows)
    lines = [f"{'case':<{width}}  {'measured':>14} {'reference':>14} "
             f"{'|dev|':>10} {'tol':>8}  result"]
    for r in rows:
        lines.append(f"{r.label:<{width}}  {r.measured:>14.9f} {r.reference:>14.9f} "
                     f"{r.deviation:>10.2e} {r.tolerance:>8.0e}  "
                     f"{'PASS' if r.passed else 'FAIL'}")
    worst = max(r.deviation / r.tolerance for r in rows)
    lines.append(f"worst deviation: {worst:.3f}x its tolerance")
    return "\n".join(lines)
