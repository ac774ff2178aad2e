import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fopwc import regularize as reg
from fopwc.abm import Trajectory
from fopwc.dynamics import (
    PeriodicTestProblem,
    asymptotic_period_estimate,
    bifurcation_scan,
    cloud_distance,
    compare_variants,
    divergence_time,
    local_maxima,
    lyapunov_spectrum,
    periodic_coefficients,
    periodic_solution,
    shift_residuals,
    verify_ml_periodic,
)
from fopwc.lyapunov import benettin_fractional
from fopwc.sprott import DEFAULT_X0, RhsVariant, SystemParams, affine_pieces, simulate

P = SystemParams()


# -- Lyapunov ---------------------------------------------------------------------


@pytest.fixture(scope="module")
def short_spectrum():
    return lyapunov_spectrum(P, T=20.0, h=0.005)


def test_spectrum_sorted_finite(short_spectrum):
    lam = short_spectrum.exponents
    assert lam.shape == (4,)
    assert np.all(np.isfinite(lam))
    assert np.all(np.diff(lam) <= 0)


def test_tangent_vectors_orthonormal(short_spectrum):
    assert short_spectrum.orthonormality_error <= 1e-10


def test_spectrum_sum_negative(short_spectrum):
    # trace J = -1 everywhere, so volumes contract
    assert short_spectrum.exponents.sum() < 0
    assert short_spectrum.mean_trace == pytest.approx(-1.0)


def test_spectrum_history(short_spectrum):
    assert short_spectrum.history.shape == (len(short_spectrum.times), 4)
    np.testing.assert_allclose(short_spectrum.history[-1], short_spectrum.exponents)


def test_spectrum_requires_smooth_variant():
    with pytest.raises(ValueError):
        lyapunov_spectrum(P, RhsVariant.la(1e-2), T=1.0)


def test_pattern_matching():
    from fopwc.dynamics import LyapunovSpectrum

    s = LyapunovSpectrum(np.array([0.01, 0.0004, -0.002, -0.5]), 1.0, 0.01, 10, RhsVariant.la(1e-2), DEFAULT_X0)
    assert s.matches("+0--")
    assert not s.matches("++0-")
    assert s.n_positive == 2
    with pytest.raises(ValueError):
        s.matches("+0-")


def test_frozen_affine_classical_limit():
    pieces = affine_pieces(P)
    M, m = pieces.M_plus, pieces.m
    res = benettin_fractional(1.0, lambda x: M @ x + m, lambda x: M, np.ones(4), 100.0, 0.01)
    expect = np.sort(np.linalg.eigvals(M).real)[::-1]
    assert np.max(np.abs(res.exponents - expect)) < 0.05


def _damped_pendulum():
    f = lambda x: np.array([x[1], -np.sin(x[0]) - 0.3 * x[1]])
    J = lambda x: np.array([[0.0, 1.0], [-np.cos(x[0]), -0.3]])
    return f, J


@pytest.mark.parametrize("system", ["affine", "pendulum"])
def test_invariant_under_doubling_renorm_interval(system):
    # memoryless limit: restarting after a QR step is exact
    if system == "affine":
        M, m = affine_pieces(P).M_plus, affine_pieces(P).m
        f, J, x0 = (lambda x: M @ x + m), (lambda x: M), np.ones(4)
    else:
        (f, J), x0 = _damped_pendulum(), np.array([2.0, 0.0])
    a = benettin_fractional(1.0, f, J, x0, 60.0, 0.01, 10).exponents
    b = benettin_fractional(1.0, f, J, x0, 60.0, 0.01, 20).exponents
    assert np.max(np.abs(a - b)) <= 2e-3


def test_tangent_restart_mode_runs():
    s = lyapunov_spectrum(P, T=5.0, h=0.01, memory="tangent-restart")
    assert np.all(np.isfinite(s.exponents))
    with pytest.raises(ValueError):
        lyapunov_spectrum(P, T=5.0, h=0.01, memory="full")


# -- bifurcation scans ------------------------------------------------------------


def test_local_maxima():
    np.testing.assert_array_equal(local_maxima(np.array([0, 2, 1, 3, 3, 0])), [2, 3])
    assert local_maxima(np.array([1.0, 2.0])).size == 0


@pytest.fixture(scope="module")
def small_scan():
    return bifurcation_scan(P, "b", [1.0, 1.5], x0s=[DEFAULT_X0, (11, -1, 0, 0.1)], T=30.0, h=0.01, transient_fraction=0.5)


def test_scan_streams_and_order(small_scan):
    keys = [(s.parameter, s.stream) for s in small_scan.samples]
    assert keys == [(1.0, 0), (1.0, 1), (1.5, 0), (1.5, 1)]
    assert all(s.error is None and s.values.size > 0 for s in small_scan.samples)
    assert all(np.all(np.isfinite(s.values)) for s in small_scan.samples)


def test_scan_deterministic(small_scan):
    again = bifurcation_scan(P, "b", [1.0, 1.5], x0s=[DEFAULT_X0, (11, -1, 0, 0.1)], T=30.0, h=0.01, transient_fraction=0.5)
    assert list(small_scan.points()) == list(again.points())


def test_scan_workers_identical(small_scan):
    par = bifurcation_scan(
        P, "b", [1.0, 1.5], x0s=[DEFAULT_X0, (11, -1, 0, 0.1)], T=30.0, h=0.01, transient_fraction=0.5, workers=2
    )
    assert list(small_scan.points()) == list(par.points())


def test_scan_records_degenerate_transient():
    d = bifurcation_scan(P, "b", [1.25], T=0.02, h=0.01, transient_fraction=0.9)
    assert d.samples[0].error is not None and d.samples[0].values.size == 0


def test_scan_records_invalid_parameter_value():
    d = bifurcation_scan(P, "q", [0.9, 1.5], T=1.0, h=0.01, transient_fraction=0.0)
    assert d.samples[0].error is None
    assert "q must lie" in d.samples[1].error


@pytest.mark.parametrize(
    "kw",
    [dict(values=[]), dict(values=[1.0, 1.0]), dict(values=[2.0, 1.0]), dict(transient_fraction=1.0), dict(parameter="x")],
)
def test_scan_validation(kw):
    args = dict(p_base=P, parameter="b", values=[1.0], T=1.0, h=0.01)
    args.update(kw)
    with pytest.raises(ValueError):
        bifurcation_scan(**args)


# -- divergence -------------------------------------------------------------------


def test_divergence_time_basic():
    t = np.arange(5) * 0.5
    a = Trajectory(t, np.zeros((5, 2)))
    b = Trajectory(t, np.array([[0, 0], [0, 1e-7], [2e-6, 0], [0, 0], [1, 1]], float))
    assert divergence_time(a, b, 1e-6) == 1.0
    assert divergence_time(a, a, 1e-6) is None


@pytest.fixture(scope="module")
def short_compare():
    return compare_variants(P, DEFAULT_X0, T=10.0, delta=1e-2, epsilon=1e-2, h=0.01)


def test_compare_before_divergence_within_threshold(short_compare):
    r = short_compare
    wa = r.trajectories["wa"]
    for name, t_div in (("ga", r.t_ga), ("la", r.t_la)):
        d = np.max(np.abs(r.trajectories[name].states - wa.states), axis=1)
        before = wa.times < (np.inf if t_div is None else t_div)
        assert np.all(d[before] <= r.threshold)
        if t_div is not None:
            assert d[np.searchsorted(wa.times, t_div)] > r.threshold


def test_compare_report_dict(short_compare):
    d = short_compare.to_dict()
    assert set(d) >= {"t_ga", "t_la", "ordered", "threshold", "diverged_within_horizon"}


def test_no_divergence_within_short_horizon():
    r = compare_variants(P, DEFAULT_X0, T=1.0, h=0.01)
    assert r.t_ga is None and r.t_la is None
    assert r.to_dict()["diverged_within_horizon"] == {"ga": False, "la": False}


def test_saturated_sigmoid_equals_exact():
    wa = simulate(P, RhsVariant.wa(), DEFAULT_X0, 20.0, 0.01)
    ga = simulate(P, RhsVariant.ga(1e-12), DEFAULT_X0, 20.0, 0.01)
    assert np.array_equal(wa.states, ga.states)


# -- periodicity ------------------------------------------------------------------


def test_period_of_cosine():
    h = 2 * math.pi / 1000
    t = np.arange(20001) * h
    traj = Trajectory(t, np.column_stack([np.cos(t), np.sin(t)]))
    est = asymptotic_period_estimate(traj)
    assert est is not None
    assert est.T_est == pytest.approx(2 * math.pi, abs=h)
    assert est.residual < 1e-8


def test_shift_residuals_direct():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(200, 3))
    r = shift_residuals(X, 10)
    for L in (0, 1, 7, 10):
        direct = math.sqrt(np.mean(np.sum((X[L:] - X[: len(X) - L]) ** 2, axis=1)))
        assert r[L] == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_period_absent_for_noise():
    rng = np.random.default_rng(3)
    traj = Trajectory(np.arange(4000) * 0.01, rng.normal(size=(4000, 4)))
    assert asymptotic_period_estimate(traj) is None


@pytest.mark.slow
def test_numerically_periodic_regime():
    traj = simulate(SystemParams(b=2.2), RhsVariant.la(1e-6), (1, 2, 0, 1), 600.0, 0.01)
    est = asymptotic_period_estimate(traj)
    assert est is not None and est.relative_residual < 0.2


@pytest.mark.slow
def test_hyperchaotic_regime_not_periodic():
    traj = simulate(SystemParams(b=0.5), RhsVariant.la(1e-6), DEFAULT_X0, 600.0, 0.01)
    assert asymptotic_period_estimate(traj) is None


# -- periodic solution with lower terminal -inf ----------------------------------


def test_periodic_example():
    assert verify_ml_periodic(PeriodicTestProblem(0.5, 1.0, 1.0, 1.0, 0.0)) < 1e-12


def test_zero_forcing():
    prob = PeriodicTestProblem(0.7, 2.0, 0.0, 3.0)
    assert verify_ml_periodic(prob) == 0.0
    assert np.all(periodic_solution(prob, np.linspace(0, 5, 20)) == 0.0)


@settings(max_examples=200)
@given(
    st.floats(0.05, 0.95),
    st.floats(0.1, 5.0),
    st.floats(-5.0, 5.0),
    st.floats(0.1, 10.0),
    st.floats(-math.pi, math.pi),
)
def test_phase_shift_invariance(q, beta, gamma, omega, alpha):
    r1 = verify_ml_periodic(PeriodicTestProblem(q, beta, gamma, omega, alpha))
    r2 = verify_ml_periodic(PeriodicTestProblem(q, beta, gamma, omega, alpha + 2 * math.pi))
    assert r1 <= 1e-12 and r2 <= 1e-12
    assert abs(r1 - r2) <= 1e-12


def test_negative_frequency_folded():
    a = periodic_solution(PeriodicTestProblem(0.6, 1.0, 1.0, -2.0, 0.4), np.linspace(0, 3, 7))
    b = periodic_solution(PeriodicTestProblem(0.6, 1.0, 1.0, 2.0, -0.4), np.linspace(0, 3, 7))
    np.testing.assert_allclose(a, b, rtol=1e-15, atol=1e-15)
    assert verify_ml_periodic(PeriodicTestProblem(0.6, 1.0, 1.0, -2.0, 0.4)) < 1e-12


def test_classical_limit_coefficients():
    beta, gamma, omega, alpha = 0.7, 1.3, 2.1, 0.4
    A, B, _ = periodic_coefficients(PeriodicTestProblem(1 - 1e-12, beta, gamma, omega, alpha))
    den = beta**2 + omega**2
    assert A == pytest.approx(gamma * (beta * math.cos(alpha) + omega * math.sin(alpha)) / den, abs=1e-8)
    assert B == pytest.approx(-gamma * (beta * math.sin(alpha) - omega * math.cos(alpha)) / den, abs=1e-8)


def test_periodic_problem_validation():
    with pytest.raises(ValueError):
        PeriodicTestProblem(0.5, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        PeriodicTestProblem(1.0, 1.0, 1.0, 1.0)


def test_degenerate_denominator():
    # |beta + Omega^q e^{i pi q/2}|^2 is positive for 0 < q < 1; only overflow can spoil it
    with pytest.raises(ZeroDivisionError):
        periodic_coefficients(PeriodicTestProblem(0.5, 1e200, 1.0, 1.0))


# -- attractor comparison ---------------------------------------------------------


def test_cloud_distance():
    P1 = np.array([[0.1, 0.1], [0.6, 0.1]])
    assert cloud_distance(P1, P1) == 0.0
    assert cloud_distance(P1, P1 + 10.0) == 1.0
    assert cloud_distance(P1, P1[:1]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        cloud_distance(P1, P1, cell=0.0)
