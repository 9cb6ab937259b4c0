"""Closed-form capture efficiencies, schedules, thresholds, and stop times.

Everything here is exact algebra for greedy (reflection-eliminating) control
of the two canonical pulses, in normalized units:

* square pulse   -- rates in units of b_max^2, time in b_max^-2, duration 1;
* exp-decay pulse -- rates in units of the pulse decay rate gamma, time in
  1/gamma, b_in(t) = e^{-t/2}.

The capped regime runs until t1, when the coupling stops saturating its cap
and the port goes reflectionless.  With intrinsic loss kappa_i the natural
combination is alpha = (1 - kappa_i) / kappa1_max; note
alpha * kappa1_max = 1 - kappa_i exactly, which is how it is computed here.

Removable singularities (kappa1_max + kappa_i = 1 for the exponential pulse)
are evaluated by series inside a relative window of 1e-6.  Root finds use
plain bracketed bisection for cross-platform determinism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Callable

LN2 = math.log(2.0)
TWO_LN2 = 2.0 * LN2

SQUARE_KIND = "square"
EXP_KIND = "exp_decay"

_SERIES_WINDOW = 1e-6
_EFF_SLACK = 1e-9


class InfeasibleProtocolError(ValueError):
    """Raised when no perfect-capture delay exists for the given caps."""


def _clamp_efficiency(value: float, what: str) -> float:
    if value > 1.0 + _EFF_SLACK or value < -_EFF_SLACK:
        raise ArithmeticError(f"{what} = {value} is outside [0, 1] beyond rounding")
    return min(max(value, 0.0), 1.0)


def _bisect(f: Callable[[float], float], lo: float, hi: float,
            tol: float = 1e-12, max_iter: int = 200) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError(f"root not bracketed on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) < tol:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# capped-regime exit time
# ---------------------------------------------------------------------------

def capped_exit_time_exp(kappa1_max: float, kappa_i: float = 0.0) -> float:
    """Time t1 at which greedy control of the exp-decay pulse goes reflectionless.

    t1 = 2 ln(2 / (1 + alpha)) / ((1 - alpha) kappa1_max); the denominator
    (1 - alpha) kappa1_max equals kappa1_max + kappa_i - 1 and vanishes
    removably at kappa1_max = 1 - kappa_i, where t1 -> 2 / (kappa1_max + 1 - kappa_i).
    """
    if kappa1_max <= 0:
        raise ValueError("kappa1_max must be positive")
    d = kappa1_max + kappa_i - 1.0
    s = kappa1_max + 1.0 - kappa_i
    if abs(d) < _SERIES_WINDOW * max(1.0, kappa1_max):
        return 2.0 / s - d / (s * s)
    return 2.0 * math.log1p(d / s) / d


def capped_exit_time_square(kappa1_max: float, kappa_i: float = 0.0) -> float:
    """Capped-regime exit time for the square pulse (may exceed the duration).

    Noiseless this is 2 ln2 / kappa1_max; with loss the cap holds until
    (2/(kappa+kappa_i)) ln(2 kappa / (kappa - kappa_i)), and forever if
    kappa1_max <= kappa_i.
    """
    if kappa1_max <= 0:
        raise ValueError("kappa1_max must be positive")
    if kappa1_max <= kappa_i:
        return math.inf
    return (2.0 / (kappa1_max + kappa_i)) * math.log(
        2.0 * kappa1_max / (kappa1_max - kappa_i))


# ---------------------------------------------------------------------------
# single-pass optimum over all pulse shapes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SinglePassOptimum:
    """Best achievable single-pass amplitude for integrated coupling tau_max."""

    tau_max: float
    amplitude: float
    beta: Callable[[float], float]


def single_pass_optimum(tau_max: float) -> SinglePassOptimum:
    """Optimal rescaled waveform beta(tau) and the amplitude it reaches.

    In the reparametrized time tau (integral of kappa), the unit-energy
    waveform maximizing the final amplitude is the exponential ramp
    beta(tau) = e^{tau/2} / sqrt(e^{tau_max} - 1), reaching
    a = sqrt(1 - e^{-tau_max}).  tau_max = 0 degenerates to no interaction.
    """
    if tau_max < 0:
        raise ValueError("tau_max must be non-negative")
    if tau_max == 0.0:
        return SinglePassOptimum(0.0, 0.0, lambda tau: 0.0)
    amplitude = math.sqrt(-math.expm1(-tau_max))
    norm = math.sqrt(-math.expm1(-tau_max))

    def beta(tau: float) -> float:
        return math.exp(0.5 * (tau - tau_max)) / norm

    return SinglePassOptimum(tau_max, amplitude, beta)


# ---------------------------------------------------------------------------
# square pulse
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SquareMetrics:
    kappa1_max: float
    kappa_i: float
    t1: float | None          # None when the cap holds for the whole pulse
    eff_first_pass: float     # a^2 at the end of the pulse window
    kappa2_min: float         # smallest second-pass cap recapturing everything


def square_metrics(kappa1_max: float, kappa_i: float = 0.0) -> SquareMetrics:
    """Greedy single-pass efficiency for the unit square pulse.

    Below the 2 ln2 cap threshold (noiseless) the coupling saturates for the
    whole window and eff = (4/k)(1 - e^{-k/2})^2; above it the schedule turns
    reflectionless at t1 and eff = 1 - (2 ln2 - 1)/k.  The minimal
    second-pass cap for full recapture is 1 / eff.
    """
    k = kappa1_max
    if k <= 0:
        raise ValueError("kappa1_max must be positive")
    t1 = capped_exit_time_square(k, kappa_i)
    if t1 >= 1.0:
        amp = (2.0 * math.sqrt(k) / (k + kappa_i)) * (-math.expm1(-0.5 * (k + kappa_i)))
        eff = amp * amp
        t1_out = None
    else:
        a_sq_t1 = 1.0 / k
        if kappa_i == 0.0:
            eff = a_sq_t1 + (1.0 - t1)
        else:
            x = kappa_i * (1.0 - t1)
            eff = a_sq_t1 * math.exp(-x) + (1.0 - t1) * (-math.expm1(-x) / x)
        t1_out = t1
    eff = _clamp_efficiency(eff, "square first-pass efficiency")
    return SquareMetrics(k, kappa_i, t1_out, eff, 1.0 / eff)


# ---------------------------------------------------------------------------
# exponential-decay pulse, noiseless
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpMetrics:
    kappa1_max: float
    t1: float
    eff_infinity: float

    def a1(self, t: float) -> float:
        """Cavity amplitude along the greedy schedule (capped then reflectionless)."""
        k = self.kappa1_max
        if t < 0:
            raise ValueError("t must be non-negative")
        if t <= self.t1:
            u = k - 1.0
            if abs(u) < 1e-9:
                g = 0.5 * t * (1.0 - 0.25 * u * t)
            else:
                g = -math.expm1(-0.5 * u * t) / u
            return 2.0 * math.sqrt(k) * math.exp(-0.5 * t) * g
        inner = 1.0 / k + 1.0 - math.exp(-(t - self.t1))
        return math.exp(-0.5 * self.t1) * math.sqrt(inner)


def exp_metrics(kappa1_max: float) -> ExpMetrics:
    """Greedy single-pass metrics for the exp-decay pulse (noiseless).

    eff_infinity = e^{-t1} (kappa + 1) / kappa, the asymptotic captured
    fraction; equals ((1 + 1/k)^{k+1} / 4)^{1/(k-1)} away from the removable
    k = 1 point.
    """
    k = kappa1_max
    t1 = capped_exit_time_exp(k)
    eff = _clamp_efficiency(math.exp(-t1) * (k + 1.0) / k, "exp single-pass efficiency")
    return ExpMetrics(k, t1, eff)


def exp_reflection(t: float, kappa1_max: float) -> float:
    """First-pass reflected amplitude of the exp-decay pulse under greedy control.

    b_out(t) = (2k/(k-1)) e^{-k t/2} - ((k+1)/(k-1)) e^{-t/2} on the capped
    interval [0, t1]; zero afterwards (reflectionless regime).
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    k = kappa1_max
    t1 = capped_exit_time_exp(k)
    if t > t1:
        return 0.0
    u = k - 1.0
    if abs(u) < 1e-12:
        core = -t
    else:
        core = 2.0 * math.expm1(-0.5 * u * t) / u
    return math.exp(-0.5 * t) * (core + 2.0 * math.exp(-0.5 * u * t) - 1.0)


def select_delay_exp_noiseless(kappa1_max: float, kappa2_max: float) -> float:
    """Delay making the second pass exactly reflectionless at its onset.

    Solves sqrt(kappa2_max) a(Delta t) = b_out(0) = 1 on the reflectionless
    branch: Delta t = t1 + ln(1 / (1 + 1/k1 - e^{t1}/k2)).  A non-positive
    log argument means even an infinite wait cannot meet the condition.
    """
    if kappa2_max <= 0:
        raise InfeasibleProtocolError("no perfect-capture delay exists: kappa2_max <= 0")
    t1 = capped_exit_time_exp(kappa1_max)
    arg = 1.0 + 1.0 / kappa1_max - math.exp(t1) / kappa2_max
    if arg <= 0.0:
        raise InfeasibleProtocolError(
            "no perfect-capture delay exists: "
            f"kappa2_max = {kappa2_max:.6g} cannot cancel the initial reflection "
            f"(needs kappa2_max * eff_single > 1)")
    return t1 + math.log(1.0 / arg)


# ---------------------------------------------------------------------------
# transcendental equal-cap threshold
# ---------------------------------------------------------------------------

def solve_k(lo: float = 1.05, hi: float = 2.0) -> float:
    """Root of (k+1)^{k+1} = 4 k^2 in (1, 2), by bisection to 1e-12.

    This is the smallest equal coupling cap (in units of the pulse decay
    rate) that permits perfect two-pass capture of the exp-decay pulse.  The
    equation also holds trivially at k = 1, so the bracket starts above it.
    """

    def f(x: float) -> float:
        return (x + 1.0) * math.log(x + 1.0) - math.log(4.0) - 2.0 * math.log(x)

    return _bisect(f, lo, hi, tol=1e-13)


# ---------------------------------------------------------------------------
# exponential-decay pulse with intrinsic loss
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoisyMetrics:
    kappa1_max: float
    kappa2_max: float
    kappa_i: float
    alpha: float
    t1: float
    T1: float
    eff1: float
    feasible: bool
    delay: float | None
    T2: float | None
    eff2: float | None
    kappa_i_threshold: float
    stop_window_ok: bool      # T2 > delay + t1 at these parameters


def _threshold_rhs(kappa_i: float, kappa1_max: float, kappa2_max: float) -> float:
    """Bound on kappa_i below which the two-pass optimum lands after recapture ends."""
    a = (1.0 - kappa_i) / kappa1_max
    one_m = 1.0 - a
    base_log = math.log1p(0.5 * (a - 1.0))        # ln((1+a)/2)
    if abs(one_m) < 1e-9:
        ratio = -0.5 - one_m / 8.0                # limit of base_log / (1 - a)
        p = math.exp(a * ratio)
    else:
        p = math.exp(a * base_log / one_m)
    p2 = p * p
    return (1.0 + a) * p2 * p2 - (a * kappa1_max / kappa2_max) * p2


def stop_window_threshold(kappa1_max: float, kappa2_max: float) -> float:
    """Largest kappa_i for which T2 > delay + t1 (self-consistent flip point).

    For large first-pass caps the recapture finishes so early that the
    condition holds for every kappa_i in (0, 1); the threshold is then
    reported as 1.0.  Conversely 0.0 means the stop window never opens.
    """

    def g(x: float) -> float:
        return _threshold_rhs(x, kappa1_max, kappa2_max) - x

    lo, hi = 1e-9, 1.0 - 1e-9
    xs = [lo + (hi - lo) * i / 400.0 for i in range(401)]
    prev_x, prev_g = xs[0], g(xs[0])
    for x in xs[1:]:
        cur = g(x)
        if prev_g == 0.0:
            return prev_x
        if prev_g * cur < 0:
            return _bisect(g, prev_x, x, tol=1e-13)
        prev_x, prev_g = x, cur
    return 1.0 if g(0.5) > 0 else 0.0


def noisy_metrics(kappa1_max: float, kappa2_max: float, kappa_i: float) -> NoisyMetrics:
    """Stop times, efficiencies and the delay under intrinsic loss.

    Single pass peaks at T1 = t1 - ln(kappa_i (1+alpha)) / (1 - kappa_i) with
    a^2(T1) = e^{-T1} / kappa_i.  When the feasibility margin
    (1+alpha) - (1-kappa_i)/kappa2_max * e^{(1-kappa_i) t1} is positive, the
    two-pass run uses the delay that zeroes the recaptured front, peaks at
    T2 = -ln(kappa_i) / (1 - kappa_i), and reaches
    a^2(T2) = kappa_i^{kappa_i / (1 - kappa_i)}.
    """
    if not (0.0 < kappa_i < 1.0):
        raise ValueError("kappa_i must lie in (0, 1) in these units")
    if kappa1_max <= 0 or kappa2_max <= 0:
        raise ValueError("coupling caps must be positive")
    ak1 = 1.0 - kappa_i                  # alpha * kappa1_max, exactly
    alpha = ak1 / kappa1_max
    t1 = capped_exit_time_exp(kappa1_max, kappa_i)
    T1 = t1 - math.log(kappa_i * (1.0 + alpha)) / ak1
    eff1 = _clamp_efficiency(math.exp(-T1) / kappa_i, "noisy single-pass efficiency")

    arg = (1.0 + alpha) - (ak1 / kappa2_max) * math.exp(ak1 * t1)
    feasible = arg > 0.0
    if feasible:
        delay = t1 + math.log(1.0 / arg) / ak1
        T2 = -math.log(kappa_i) / ak1
        eff2 = _clamp_efficiency(kappa_i ** (kappa_i / (1.0 - kappa_i)),
                                 "noisy two-pass efficiency")
        window_ok = T2 > delay + t1
    else:
        delay = T2 = eff2 = None
        window_ok = False

    threshold = stop_window_threshold(kappa1_max, kappa2_max)
    return NoisyMetrics(kappa1_max, kappa2_max, kappa_i, alpha, t1, T1, eff1,
                        feasible, delay, T2, eff2, threshold, window_ok)


def select_delay_exp(kappa1_max: float, kappa2_max: float, kappa_i: float = 0.0) -> float:
    """Recapture delay for the exp-decay pulse, noiseless or lossy.

    Raises :class:`InfeasibleProtocolError` when no delay gives zero
    reflection at the second port (including exactly marginal caps).
    """
    if kappa_i == 0.0:
        return select_delay_exp_noiseless(kappa1_max, kappa2_max)
    nm = noisy_metrics(kappa1_max, kappa2_max, kappa_i)
    if not nm.feasible:
        raise InfeasibleProtocolError(
            "no perfect-capture delay exists for "
            f"kappa1_max={kappa1_max:.6g}, kappa2_max={kappa2_max:.6g}, "
            f"kappa_i={kappa_i:.6g}")
    return nm.delay


@dataclass(frozen=True)
class ImprovementFactor:
    exact: float          # a1(T1) / a2(T2)
    small_alpha: float    # 1 - ln(2/sqrt(e)) / kappa1_max


def improvement_factor(kappa1_max: float, kappa_i: float) -> ImprovementFactor:
    """Amplitude ratio of single-pass to two-pass capture at their stop times."""
    nm = noisy_metrics(kappa1_max, kappa1_max, kappa_i)
    eff2 = kappa_i ** (kappa_i / (1.0 - kappa_i))
    exact = math.sqrt(nm.eff1 / eff2)
    approx = 1.0 - (LN2 - 0.5) / kappa1_max
    return ImprovementFactor(exact, approx)


# ---------------------------------------------------------------------------
# consolidated report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticReport:
    pulse: str
    kappa1_max: float
    kappa2_max: float | None
    kappa_i: float
    tau_max: float | None
    alpha: float | None
    t1: float | None
    delay: float | None
    T1: float | None
    T2: float | None
    eff_single: float
    eff_two: float | None
    kappa2_min: float
    k_const: float
    kappa_i_threshold: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def build_report(pulse: str, kappa1_max: float, kappa2_max: float | None = None,
                 kappa_i: float = 0.0, tau_max: float | None = None) -> AnalyticReport:
    """Collect every closed-form quantity relevant to one configuration."""
    k_const = solve_k()
    if pulse == SQUARE_KIND:
        sm = square_metrics(kappa1_max, kappa_i)
        k2 = kappa2_max
        eff_two = None
        if k2 is not None and k2 >= sm.kappa2_min and kappa_i == 0.0:
            eff_two = 1.0
        return AnalyticReport(pulse, kappa1_max, kappa2_max, kappa_i, tau_max,
                              None, sm.t1, None, None, None,
                              sm.eff_first_pass, eff_two, sm.kappa2_min, k_const)
    if pulse != EXP_KIND:
        raise ValueError(f"no closed forms for pulse kind {pulse!r}")
    if kappa_i == 0.0:
        em = exp_metrics(kappa1_max)
        kappa2_min = 1.0 / em.eff_infinity
        delay = eff_two = None
        if kappa2_max is not None:
            try:
                delay = select_delay_exp_noiseless(kappa1_max, kappa2_max)
                eff_two = 1.0
            except InfeasibleProtocolError:
                pass
        return AnalyticReport(pulse, kappa1_max, kappa2_max, kappa_i, tau_max,
                              1.0 / kappa1_max, em.t1, delay, None, None,
                              em.eff_infinity, eff_two, kappa2_min, k_const)
    nm = noisy_metrics(kappa1_max, kappa2_max if kappa2_max else kappa1_max, kappa_i)
    kappa2_min = (1.0 - kappa_i) * math.exp((1.0 - kappa_i) * nm.t1) / (1.0 + nm.alpha)
    return AnalyticReport(pulse, kappa1_max, kappa2_max, kappa_i, tau_max,
                          nm.alpha, nm.t1, nm.delay, nm.T1, nm.T2,
                          nm.eff1, nm.eff2, kappa2_min, k_const,
                          kappa_i_threshold=nm.kappa_i_threshold)
