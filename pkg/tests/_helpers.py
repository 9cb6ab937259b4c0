"""Shared fixtures-free helpers for the test suite."""

from __future__ import annotations

import math

import numpy as np

from photon_recycler import CouplingPolicy, PulseSpec, SimConfig


def optimal_ramp_pulse(kappa: float, t_max: float, dt: float) -> PulseSpec:
    """Exponential-growth pulse maximizing single-pass capture at constant kappa.

    b(t) = sqrt(kappa) e^{kappa t / 2} / sqrt(e^{kappa t_max} - 1), tabulated
    on the integrator's half-step grid so stage samples are exact.
    """
    n = int(round(t_max / dt))
    t = np.arange(2 * n + 1) * (dt / 2.0)
    b = math.sqrt(kappa) * np.exp(0.5 * kappa * (t - t_max))
    b /= math.sqrt(-math.expm1(-kappa * t_max))
    return PulseSpec.tabulated(b, dt / 2.0)


def reparametrized_run(beta, tau_max: float, profile, dt: float):
    """Build (pulse, policy, config) realizing waveform beta under kappa profile.

    ``profile`` maps time to a positive coupling rate.  The profile is
    rescaled by a constant so the integrated coupling hits tau_max exactly on
    a full grid node, which becomes the horizon.
    """
    # generous horizon: integrate until tau_max is passed
    t = [0.0]
    while True:
        n_guess = 2 * len(t)
        t = np.arange(n_guess + 1) * (dt / 2.0)
        kappa = profile(t)
        tau = np.concatenate([[0.0], np.cumsum((kappa[1:] + kappa[:-1]) * 0.25 * dt)])
        if tau[-1] > tau_max * 1.05:
            break
    full = np.arange(0, tau.size, 2)
    i_max = int(full[np.searchsorted(tau[full], tau_max)])
    lam = tau_max / tau[i_max]

    kappa = lam * kappa[: i_max + 1]
    tau = lam * tau[: i_max + 1]
    b = np.sqrt(kappa) * beta(tau)
    t_end = (i_max // 2) * dt

    pulse = PulseSpec.tabulated_normalized(b, dt / 2.0)
    policy = CouplingPolicy.tabulated(kappa, dt / 2.0)
    config = SimConfig(dt=dt, t_end=t_end)
    return pulse, policy, config


def random_reparam_pair(rng: np.random.Generator, dt: float = 1e-4):
    """Two runs with different coupling profiles but identical rescaled waveform."""
    tau_max = rng.uniform(1.0, 2.2)
    amp = rng.uniform(0.2, 0.45)
    freq = rng.uniform(0.5, 2.0)
    phase = rng.uniform(0.0, 2.0 * math.pi)

    def beta(tau):
        return 1.0 + amp * np.sin(freq * tau + phase)

    runs = []
    for _ in range(2):
        u = rng.uniform(0.8, 2.0)
        v = rng.uniform(0.0, 0.6) * u
        w = rng.uniform(0.5, 3.0)
        psi = rng.uniform(0.0, 2.0 * math.pi)
        runs.append(reparametrized_run(
            beta, tau_max, lambda t, u=u, v=v, w=w, psi=psi: u + v * np.sin(w * t + psi) ** 2,
            dt))
    return runs
