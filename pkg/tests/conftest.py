import pytest

from photon_recycler import CouplingPolicy, PulseSpec, SimConfig
from photon_recycler.core import simulate_single_pass, simulate_two_pass


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    """Trigger JIT compilation once so individual tests measure physics, not numba."""
    pulse = PulseSpec.exp_decay()
    cfg = SimConfig(dt=1e-2, t_end=2.0, delay=0.02)
    simulate_single_pass(pulse, CouplingPolicy.greedy(1.0), cfg.with_(delay=0.0))
    simulate_two_pass(pulse, CouplingPolicy.greedy(1.0), CouplingPolicy.greedy(1.0), cfg)
