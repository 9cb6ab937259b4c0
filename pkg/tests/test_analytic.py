import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from photon_recycler import analytic
from photon_recycler.analytic import (LN2, TWO_LN2, build_report,
                                      capped_exit_time_exp, exp_metrics,
                                      exp_reflection, improvement_factor,
                                      noisy_metrics, single_pass_optimum,
                                      solve_k, square_metrics)


# --- single_pass_optimum ----------------------------------------------------

def test_optimum_amplitude_at_ln2():
    opt = single_pass_optimum(LN2)
    assert opt.amplitude == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)


def test_optimum_limits():
    assert single_pass_optimum(0.0).amplitude == 0.0
    assert single_pass_optimum(60.0).amplitude == pytest.approx(1.0, abs=1e-12)


def test_optimum_waveform_unit_energy_and_amplitude_by_quadrature():
    for tau_max in (LN2, 1.7, 4.0):
        opt = single_pass_optimum(tau_max)
        energy, _ = quad(lambda x: opt.beta(x) ** 2, 0.0, tau_max)
        assert energy == pytest.approx(1.0, abs=1e-10)
        # independent amplitude: integrate the response kernel against beta
        amp, _ = quad(lambda x: math.exp(0.5 * (x - tau_max)) * opt.beta(x),
                      0.0, tau_max)
        assert amp == pytest.approx(opt.amplitude, abs=1e-10)


# --- square metrics ---------------------------------------------------------

def test_square_known_values():
    m4 = square_metrics(4.0)
    assert m4.eff_first_pass == pytest.approx(1.0 - (TWO_LN2 - 1.0) / 4.0, abs=1e-12)
    assert m4.t1 == pytest.approx(LN2 / 2.0, abs=1e-12)
    assert m4.kappa2_min == pytest.approx(1.0 / m4.eff_first_pass, abs=1e-12)

    m3 = square_metrics(3.0)
    assert m3.eff_first_pass == pytest.approx(0.8712352129600365, abs=1e-12)

    # at the threshold cap the efficiency is 1/(2 ln2), so the cap that
    # exactly recaptures its own reflection is the threshold itself
    m_thr = square_metrics(TWO_LN2)
    assert m_thr.eff_first_pass == pytest.approx(1.0 / TWO_LN2, abs=1e-9)
    assert m_thr.kappa2_min == pytest.approx(TWO_LN2, abs=1e-9)


def test_square_branch_continuity_at_threshold():
    eps = 1e-12
    lo = square_metrics(TWO_LN2 * (1 - eps)).eff_first_pass
    hi = square_metrics(TWO_LN2 * (1 + eps)).eff_first_pass
    assert abs(hi - lo) < 1e-12


def test_square_capped_branch_against_ode_oracle():
    def oracle(kappa, kappa_i):
        def rhs(t, y):
            a = y[0]
            b = 1.0 if t < 1.0 else 0.0
            k = kappa if a <= 1e-12 else min(kappa, (b / a) ** 2)
            return [-0.5 * (k + kappa_i) * a + math.sqrt(k) * b]
        sol = solve_ivp(rhs, (0.0, 1.0), [0.0], rtol=1e-11, atol=1e-13,
                        max_step=1e-3)
        return sol.y[0, -1] ** 2

    for kappa, kappa_i in ((1.0, 0.0), (3.0, 0.0), (1.0, 0.01), (3.0, 0.01)):
        ref = oracle(kappa, kappa_i)
        assert square_metrics(kappa, kappa_i).eff_first_pass == pytest.approx(
            ref, abs=5e-8)


def test_square_efficiency_monotone_in_cap():
    grid = np.geomspace(0.2, 8.0, 50)
    effs = [square_metrics(k).eff_first_pass for k in grid]
    assert np.all(np.diff(effs) > 0)


# --- exp metrics ------------------------------------------------------------

def test_exp_known_values():
    m2 = exp_metrics(2.0)
    assert m2.t1 == pytest.approx(2.0 * math.log(4.0 / 3.0), abs=1e-13)
    assert m2.eff_infinity == pytest.approx(0.84375, abs=1e-13)
    assert exp_metrics(3.0).eff_infinity == pytest.approx(8.0 / 9.0, abs=1e-13)


def test_exp_large_cap_asymptote():
    eff = exp_metrics(100.0).eff_infinity
    assert abs(eff - (1.0 - (TWO_LN2 - 1.0) / 100.0)) < 1e-3


def test_exp_removable_singularity_is_continuous():
    mid = exp_metrics(1.0)
    assert mid.t1 == pytest.approx(1.0, abs=1e-9)
    assert mid.eff_infinity == pytest.approx(2.0 / math.e, abs=1e-9)
    for k in (1.0 - 1e-7, 1.0 + 1e-7):
        assert exp_metrics(k).eff_infinity == pytest.approx(mid.eff_infinity, abs=1e-6)
        assert exp_metrics(k).t1 == pytest.approx(1.0, abs=1e-6)


def test_exp_amplitude_evaluator_continuous_at_t1():
    for k in (0.5, 1.0, 2.0, 5.0):
        m = exp_metrics(k)
        assert m.a1(m.t1 - 1e-9) == pytest.approx(m.a1(m.t1 + 1e-9), abs=1e-7)
        assert m.a1(m.t1) == pytest.approx(math.exp(-m.t1 / 2) / math.sqrt(k), rel=1e-9)


def test_exp_efficiency_monotone_in_cap():
    grid = np.geomspace(0.2, 8.0, 50)
    effs = [exp_metrics(k).eff_infinity for k in grid]
    assert np.all(np.diff(effs) > 0)


# --- exp reflection ---------------------------------------------------------

def test_reflection_starts_at_full_amplitude():
    for k in (0.5, 1.0, 2.0, 4.0):
        assert exp_reflection(0.0, k) == pytest.approx(1.0, abs=1e-12)


def test_reflection_vanishes_at_t1():
    m = exp_metrics(2.0)
    assert exp_reflection(m.t1, 2.0) == pytest.approx(0.0, abs=1e-12)
    assert exp_reflection(m.t1 + 0.1, 2.0) == 0.0


def test_reflection_energy_ledger_closure_by_quadrature():
    # captured + reflected = injected over the capped interval
    for k in (0.7, 2.0, 3.5):
        m = exp_metrics(k)
        reflected, _ = quad(lambda t: exp_reflection(t, k) ** 2, 0.0, m.t1)
        injected, _ = quad(lambda t: math.exp(-t), 0.0, m.t1)
        assert m.a1(m.t1) ** 2 == pytest.approx(injected - reflected, abs=1e-10)


def test_reflection_rejects_negative_time():
    with pytest.raises(ValueError):
        exp_reflection(-0.1, 2.0)


# --- solve_k ----------------------------------------------------------------

def test_solve_k_value_and_residual():
    k = solve_k()
    assert abs(k - 1.2834) < 5e-5
    assert abs((k + 1.0) ** (k + 1.0) - 4.0 * k * k) < 1e-10


def test_solve_k_matches_independent_root_finder():
    ref = brentq(lambda x: (x + 1) * math.log(x + 1) - math.log(4) - 2 * math.log(x),
                 1.05, 2.0, xtol=1e-14)
    assert solve_k() == pytest.approx(ref, abs=1e-11)


def test_solve_k_stable_under_bracket_perturbation():
    base = solve_k()
    assert solve_k(1.06, 1.99) == pytest.approx(base, abs=1e-11)
    assert solve_k(1.02, 2.2) == pytest.approx(base, abs=1e-11)


def test_solve_k_is_the_equal_cap_feasibility_edge():
    k = solve_k()
    for factor, feasible in ((1.001, True), (0.999, False)):
        kap = k * factor
        margin = kap * exp_metrics(kap).eff_infinity - 1.0
        assert (margin > 0) is feasible


# --- noisy metrics ----------------------------------------------------------

def test_noisy_two_pass_ceiling_value():
    nm = noisy_metrics(2.0, 2.0, 0.001)
    assert nm.eff2 == pytest.approx(0.001 ** (0.001 / 0.999), abs=1e-12)
    assert nm.eff2 == pytest.approx(0.9931091813749796, abs=1e-9)


def test_noisy_single_pass_matches_literal_closed_form():
    for k1, ki in ((0.5, 1e-3), (1.5, 1e-3), (3.0, 1e-3), (2.0, 0.05), (6.0, 0.2)):
        nm = noisy_metrics(k1, k1, ki)
        alpha = nm.alpha
        literal = (ki ** (ki / (1 - ki))
                   * 2.0 ** (-2.0 / (k1 + ki - 1.0))
                   * (1 + alpha) ** ((1 + alpha) / (alpha * k1 * (1 - alpha))))
        assert nm.eff1 == pytest.approx(literal, rel=1e-12)


def test_noisy_stop_time_example():
    nm = noisy_metrics(3.0, 3.0, 0.001)
    assert nm.T2 == pytest.approx(-math.log(0.001) / 0.999, abs=1e-12)
    assert nm.T2 == pytest.approx(6.914669948931068, abs=1e-9)


def test_noisy_reduces_to_noiseless_in_small_loss_limit():
    ki = 1e-12
    nm = noisy_metrics(2.0, 2.0, ki)
    assert nm.t1 == pytest.approx(capped_exit_time_exp(2.0), abs=1e-9)
    assert nm.delay == pytest.approx(analytic.select_delay_exp_noiseless(2.0, 2.0),
                                     abs=1e-9)
    assert nm.alpha == pytest.approx(0.5, abs=1e-12)


def test_noisy_infeasible_reports_single_pass_only():
    nm = noisy_metrics(1.2, 1.2, 0.001)
    assert not nm.feasible
    assert nm.delay is None and nm.T2 is None and nm.eff2 is None
    assert 0.0 < nm.eff1 < 1.0


def test_noisy_rejects_out_of_range_loss():
    with pytest.raises(ValueError):
        noisy_metrics(2.0, 2.0, 0.0)
    with pytest.raises(ValueError):
        noisy_metrics(2.0, 2.0, 1.0)


def test_stop_window_threshold_matches_direct_condition_crossing():
    # independent check: bisect T2 - (delay + t1) on the raw formulas
    def gap(ki):
        nm = noisy_metrics(2.0, 2.0, ki)
        return nm.T2 - nm.delay - nm.t1

    direct = brentq(gap, 0.05, 0.9, xtol=1e-12)
    nm = noisy_metrics(2.0, 2.0, 0.1)
    assert nm.kappa_i_threshold == pytest.approx(direct, abs=1e-9)
    assert nm.kappa_i_threshold == pytest.approx(0.44488236837811, abs=1e-6)


def test_stop_window_threshold_asymmetric_caps():
    def gap(ki):
        nm = noisy_metrics(2.0, 3.0, ki)
        return nm.T2 - nm.delay - nm.t1

    direct = brentq(gap, 0.05, 0.9, xtol=1e-12)
    assert noisy_metrics(2.0, 3.0, 0.1).kappa_i_threshold == pytest.approx(
        direct, abs=1e-9)


def test_stop_window_flag_consistent_with_threshold():
    for ki in (0.05, 0.2, 0.4, 0.5, 0.7):
        nm = noisy_metrics(2.0, 2.0, ki)
        if nm.feasible:
            assert nm.stop_window_ok == (ki < nm.kappa_i_threshold)


def test_stop_window_holds_below_threshold_example():
    nm = noisy_metrics(2.0, 2.0, 0.2)
    assert nm.stop_window_ok
    assert nm.T2 > nm.delay + nm.t1


# --- improvement factor -----------------------------------------------------

def test_improvement_consistent_with_efficiencies():
    nm = noisy_metrics(3.0, 3.0, 0.001)
    imp = improvement_factor(3.0, 0.001)
    assert imp.exact == pytest.approx(math.sqrt(nm.eff1 / nm.eff2), rel=1e-12)


def test_improvement_small_alpha_approximation():
    imp = improvement_factor(50.0, 1e-4)
    assert abs(imp.exact - imp.small_alpha) < 1e-3
    assert imp.small_alpha == pytest.approx(1.0 - (LN2 - 0.5) / 50.0, abs=1e-15)


# --- report -----------------------------------------------------------------

def test_report_exp_noiseless():
    rep = build_report("exp_decay", 3.0)
    assert rep.eff_single == pytest.approx(8.0 / 9.0, abs=1e-9)
    assert rep.kappa2_min == pytest.approx(9.0 / 8.0, abs=1e-9)
    assert rep.T1 is None and rep.T2 is None
    assert rep.k_const == pytest.approx(1.2834, abs=5e-5)


def test_report_square_with_feasible_second_pass():
    rep = build_report("square", 2.0, kappa2_max=2.0)
    assert rep.eff_two == 1.0
    assert rep.t1 == pytest.approx(LN2, abs=1e-12)


def test_report_noisy_continuity_to_noiseless():
    noisy = build_report("exp_decay", 2.0, kappa2_max=2.0, kappa_i=1e-12)
    clean = build_report("exp_decay", 2.0, kappa2_max=2.0, kappa_i=0.0)
    assert noisy.t1 == pytest.approx(clean.t1, abs=1e-9)
    assert noisy.delay == pytest.approx(clean.delay, abs=1e-9)
    assert noisy.eff_single == pytest.approx(clean.eff_single, abs=1e-9)


def test_report_efficiencies_in_range():
    for pulse in ("square", "exp_decay"):
        for k in (0.3, 1.0, 2.5, 7.0):
            rep = build_report(pulse, k, kappa2_max=k, kappa_i=0.001)
            assert 0.0 <= rep.eff_single <= 1.0
            if rep.eff_two is not None:
                assert 0.0 <= rep.eff_two <= 1.0
