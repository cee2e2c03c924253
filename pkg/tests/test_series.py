import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdeform import series
from fdeform.deformation import DeformationSpec
from fdeform.errors import CapExceeded, NotSymmetric
from fdeform.hamiltonian import DiagonalHamiltonian
from fdeform.series import (CoherentScenario, TruncationPolicy, intensity, mode_weights,
                            truncation_order, undeformed_intensity, visibility)

IDENTITY = DiagonalHamiltonian(DeformationSpec.identity())
SELF_Q = DiagonalHamiltonian(DeformationSpec.self_collision(0.25))


def brute_force_visibility(alpha_sq, exponent, t, cutoff=60):
    """Direct double sum with factorials, no shared code with the engine."""
    total = 0j
    for na in range(cutoff):
        for nb in range(cutoff):
            w = alpha_sq ** (na + nb) / (math.factorial(na) * math.factorial(nb))
            total += w * cmath.exp(1j * exponent(na, nb) * t)
    return math.exp(-2 * alpha_sq) * total


def self_collision_closed_form(alpha_sq, kappa, t):
    return math.exp(-2 * alpha_sq * (1 - math.cos(2 * kappa * t)))


@pytest.mark.parametrize("alpha_sq,kappa,t", [(1.0, 0.25, 2 * math.pi), (1.0, 0.25, 1.3),
                                              (2.5, 0.1, 7.7), (0.3, 1.0, 0.4)])
def test_closed_form_matches_brute_force(alpha_sq, kappa, t):
    brute = brute_force_visibility(alpha_sq, lambda na, nb: 2 * kappa * (nb - na), t)
    assert abs(brute - self_collision_closed_form(alpha_sq, kappa, t)) < 1e-13


def test_truncation_order_vacuum():
    assert truncation_order(0.0) == 0
    assert truncation_order(0.0, TruncationPolicy(1e-3)) == 0


def test_truncation_order_alpha_one():
    # smallest N with sum_{k>N} e^-1/k! <= 5e-13, from mpmath at 50 digits
    assert truncation_order(1.0, TruncationPolicy(1e-12)) == 14


def test_truncation_order_tail_oracle():
    mpmath.mp.dps = 40
    for alpha_sq in (0.1, 4.0, 10.0):
        n = truncation_order(alpha_sq)
        tail = lambda m: mpmath.nsum(  # noqa: E731
            lambda k: mpmath.e ** -alpha_sq * mpmath.mpf(alpha_sq) ** k / mpmath.factorial(k),
            [m + 1, mpmath.inf])
        assert tail(n) <= 5e-13 < tail(n - 1)


def test_truncation_cap_exceeded():
    with pytest.raises(CapExceeded):
        truncation_order(1.0, TruncationPolicy(1e-12, n_cap=2))


def test_mode_weights_match_poisson_pmf():
    mpmath.mp.dps = 30
    for alpha_sq in (0.1, 3.0, 40.0):
        w = mode_weights(alpha_sq, 60)
        for k in (0, 1, 7, 33, 60):
            exact = mpmath.e ** -alpha_sq * mpmath.mpf(alpha_sq) ** k / mpmath.factorial(k)
            assert abs(w[k] - float(exact)) <= 1e-14 * float(exact) + 1e-300


def test_mode_weights_log_space_for_large_alpha():
    w = mode_weights(800.0, 1100)
    assert np.all(np.isfinite(w)) and w[0] == 0.0
    assert math.fsum(w.tolist()) == pytest.approx(1.0, abs=1e-12)
    exact = mpmath.e ** -800 * mpmath.mpf(800) ** 800 / mpmath.factorial(800)
    assert w[800] == pytest.approx(float(exact), rel=1e-11)


@pytest.mark.parametrize("alpha_sq", [0.1, 1.0, 4.0, 10.0])
def test_weight_normalization(alpha_sq):
    policy = TruncationPolicy()
    curve = visibility(IDENTITY, CoherentScenario(alpha_sq), policy)
    assert 1 - curve.weight_total <= policy.epsilon
    assert curve.weight_total <= 1.0


@pytest.mark.parametrize("alpha_sq", [0.0, 0.5, 1.0, 6.0])
def test_identity_visibility_is_one(alpha_sq):
    curve = visibility(IDENTITY, CoherentScenario(alpha_sq, times=np.linspace(0, 20, 41)))
    assert np.all(np.abs(curve.v - 1) <= curve.truncation_bound)


@pytest.mark.parametrize("kappa", [0.05, 0.5])
@pytest.mark.parametrize("alpha_sq", [0.7, 3.0])
def test_cross_collision_visibility_is_one(kappa, alpha_sq):
    H = DiagonalHamiltonian(DeformationSpec.cross_collision(kappa))
    curve = visibility(H, CoherentScenario(alpha_sq, times=np.linspace(0, 20, 21)))
    assert np.all(np.abs(curve.v - 1) <= curve.truncation_bound)


def test_self_collision_visibility_closed_form():
    times = np.linspace(0, 8 * math.pi / 0.25, 200)
    curve = visibility(SELF_Q, CoherentScenario(1.0, times=times))
    ref = np.array([self_collision_closed_form(1.0, 0.25, t) for t in times])
    assert np.max(np.abs(curve.v - ref)) <= 1e-10
    collapse = visibility(SELF_Q, CoherentScenario(1.0, times=[2 * math.pi]))
    assert collapse.v_abs[0] == pytest.approx(math.exp(-4), abs=1e-10)


def test_visibility_at_zero_time():
    for H in (SELF_Q, DiagonalHamiltonian(DeformationSpec.q_oscillator(0.8))):
        curve = visibility(H, CoherentScenario(2.0, times=[0.0]))
        assert abs(curve.v[0] - 1) <= curve.truncation_bound


def test_intensity_examples():
    scen = lambda d: CoherentScenario(1.0, fringe_phase=d)  # noqa: E731
    assert intensity(IDENTITY, scen(0.0)) == pytest.approx(4.0, abs=1e-10)
    assert intensity(IDENTITY, scen(math.pi / 2)) == pytest.approx(2.0, abs=1e-10)
    assert intensity(IDENTITY, scen(math.pi)) == pytest.approx(0.0, abs=1e-10)
    assert intensity(SELF_Q, scen(0.0), t=2 * math.pi) == pytest.approx(
        2 * (1 + math.exp(-4)), abs=1e-10)
    assert intensity(SELF_Q, scen(math.pi), t=2 * math.pi) == pytest.approx(
        2 * (1 - math.exp(-4)), abs=1e-10)


def test_intensity_vacuum():
    assert intensity(SELF_Q, CoherentScenario(0.0), t=3.0) == 0.0


def test_undeformed_intensity():
    assert undeformed_intensity(1.0, 0.0) == 4.0
    assert undeformed_intensity(1.0, math.pi / 2) == pytest.approx(2.0, abs=1e-15)
    assert undeformed_intensity(2.5, math.pi) == 0.0


def test_intensity_map_matches_pointwise():
    scen = CoherentScenario(1.5, times=[0.0, 1.0, 2.5])
    deltas = [0.0, 1.0, 2.0]
    imap = series.intensity_map(SELF_Q, scen, deltas)
    for i, t in enumerate(scen.times):
        for j, d in enumerate(deltas):
            single = intensity(SELF_Q, CoherentScenario(1.5, fringe_phase=d), t=t)
            assert imap.intensity[i, j] == pytest.approx(single, abs=1e-14)


def test_not_symmetric_gate():
    H = DiagonalHamiltonian(DeformationSpec.custom_entangled(lambda a, b: 1.0 + 0.1 * a))
    scen = CoherentScenario(1.0, times=[0.0, 1.0])
    with pytest.raises(NotSymmetric):
        visibility(H, scen)
    curve = visibility(H, scen, allow_asymmetric=True)
    assert not curve.symmetric_regime
    assert abs(curve.v[1].imag) > 1e-3
    # intensity has no symmetry precondition
    intensity(H, scen, t=1.0)


def test_convergence_when_doubling_cutoff():
    alpha_sq, times = 2.0, np.array([0.0, 1.7, 5.0])
    H = DiagonalHamiltonian(DeformationSpec.q_oscillator(0.6))
    curve = visibility(H, CoherentScenario(alpha_sq, times=times))
    n2 = 2 * curve.n_cutoff
    w = mode_weights(alpha_sq, n2)
    lat = series._Lattice(n2, np.outer(w, w).ravel(), H.e_table(n2).ravel(), 0.0, 1.0)
    doubled = series._phase_sums(lat, times)
    assert np.all(np.abs(doubled - curve.v) <= curve.truncation_bound)


def test_bit_identical_repeats():
    scen = CoherentScenario(3.0, times=np.linspace(0, 10, 50))
    H = DiagonalHamiltonian(DeformationSpec.q_oscillator(0.2))
    a, b = visibility(H, scen), visibility(H, scen)
    assert a.v.tobytes() == b.v.tobytes()


def test_single_time_matches_grid():
    # each time point is self-contained
    times = np.linspace(0, 10, 11)
    grid = visibility(SELF_Q, CoherentScenario(1.0, times=times)).v
    for t, v in zip(times, grid):
        assert visibility(SELF_Q, CoherentScenario(1.0, times=[t])).v[0] == v


def test_scenario_validation():
    with pytest.raises(ValueError):
        CoherentScenario(-1.0)
    with pytest.raises(ValueError):
        CoherentScenario(1.0, times=[1.0, 1.0])
    with pytest.raises(ValueError):
        TruncationPolicy(epsilon=0.0)


symmetric_tables = st.integers(0, 2 ** 32 - 1).map(
    lambda seed: np.random.default_rng(seed).uniform(0.2, 2.0, (40, 40))).map(
    lambda m: (m + m.T) / 2)


@given(symmetric_tables, st.floats(0.05, 4.0), st.floats(0.0, 20.0))
@settings(max_examples=25, deadline=None)
def test_symmetric_custom_invariants(table, alpha_sq, t):
    H = DiagonalHamiltonian(DeformationSpec.custom_entangled(table, symmetric=True))
    curve = visibility(H, CoherentScenario(alpha_sq, times=[t]))
    assert abs(curve.v[0].imag) <= curve.truncation_bound
    assert curve.v_abs[0] <= curve.weight_total + curve.truncation_bound
    assert curve.v_abs[0] <= 1 + curve.truncation_bound
