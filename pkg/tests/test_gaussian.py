import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqzradar.fock import FrequencyTag, ModeLabel, ModeRegister, StateVector, expectation, number, variance
from sqzradar.gaussian import (
    CoherentParams,
    SqueezeParams,
    choose_cutoff,
    coherent_state,
    displaced_squeezed_state,
    displacement_for,
    displacement_matrix,
    fock_amplitudes,
    mean_photon,
    number_variance,
    optimal_number_variance,
    squeeze_matrix,
    squeezed_vacuum_r,
)

T = ModeLabel(FrequencyTag.T)


def hermite_oracle(alpha, r, theta, n_max):
    """Closed-form amplitudes <n|D(alpha) S(xi)|0> via complex Hermite polynomials.

    Uses the standard result for S(xi) = exp((xi^* a^2 - xi a^dag^2)/2):
    <n|alpha, xi> = exp(-|alpha|^2/2 - alpha^*^2 e^{i theta} tanh r / 2) / sqrt(cosh r)
                    * (e^{i theta} tanh r / 2)^{n/2} / sqrt(n!) * H_n(gamma / sqrt(e^{i theta} sinh 2r))
    with gamma = alpha cosh r + alpha^* e^{i theta} sinh r.
    """
    if r == 0:
        k = np.arange(n_max)
        return np.array(
            [cmath.exp(-abs(alpha) ** 2 / 2) * alpha**j / math.sqrt(math.factorial(j)) for j in k]
        )
    e = cmath.exp(1j * theta)
    gamma = alpha * math.cosh(r) + alpha.conjugate() * e * math.sinh(r)
    arg = gamma / cmath.sqrt(e * math.sinh(2 * r))
    pref = cmath.exp(-abs(alpha) ** 2 / 2 - alpha.conjugate() ** 2 * e * math.tanh(r) / 2) / math.sqrt(math.cosh(r))
    root = cmath.sqrt(e * math.tanh(r) / 2)
    h_prev, h = 1.0 + 0j, 2 * arg
    out = np.zeros(n_max, dtype=complex)
    for n in range(n_max):
        if n == 0:
            hn = 1.0
        elif n == 1:
            hn = h
        else:
            h_prev, h = h, 2 * arg * h - 2 * (n - 1) * h_prev
            hn = h
        out[n] = pref * root**n / math.sqrt(math.factorial(n)) * hn
    return out


@pytest.mark.parametrize(
    "alpha, r, theta",
    [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.5 + 0.5j, 0.4, 0.3), (-0.7j, 0.8, 2.0), (0.0, 0.6, 1.0), (2.0, 0.5, 0.0)],
)
def test_amplitudes_match_hermite_oracle(alpha, r, theta):
    amps = fock_amplitudes(complex(alpha), SqueezeParams(r, theta), 30)
    oracle = hermite_oracle(complex(alpha), r, theta, 30)
    assert np.abs(amps - oracle).max() < 1e-10


def test_vacuum_and_coherent_examples():
    reg = ModeRegister.single(T, 12)
    vac = displaced_squeezed_state(reg, T, 0.0, SqueezeParams(0.0))
    assert np.allclose(vac.amplitudes, StateVector.vacuum(reg).amplitudes)
    coh = coherent_state(reg, T, CoherentParams(1.0))
    expected = [math.exp(-0.5) / math.sqrt(math.factorial(n)) for n in range(12)]
    assert np.allclose(coh.amplitudes, expected, atol=1e-14)


def test_mean_photon_of_displaced_squeezed_state():
    reg = ModeRegister.single(T, 60)
    state = displaced_squeezed_state(reg, T, 2.0, SqueezeParams(0.5, 0.0))
    assert expectation(state, number(reg, T)).real == pytest.approx(4 + math.sinh(0.5) ** 2, abs=1e-7)


def test_mean_photon_formula():
    assert mean_photon(0.0) == 0.0
    assert mean_photon(0.0, SqueezeParams(1.0)) == pytest.approx(1.3811, abs=1e-4)
    reg = ModeRegister.single(T, 60)
    sq = SqueezeParams(0.7, 0.4)
    state = displaced_squeezed_state(reg, T, 1.5, sq)
    assert expectation(state, number(reg, T)).real == pytest.approx(mean_photon(1.5, sq), abs=1e-7)


def test_number_variance_examples():
    assert number_variance(2.0) == pytest.approx(4.0)
    target = 2 * math.cosh(0.8) ** 2 * math.sinh(0.8) ** 2
    for theta in (0.0, 1.0, 3.0):
        assert number_variance(0.0, SqueezeParams(0.8, theta)) == pytest.approx(target)
    reg = ModeRegister.single(T, 60)
    state = displaced_squeezed_state(reg, T, 0.0, SqueezeParams(0.8, 0.0))
    assert variance(state, number(reg, T)) == pytest.approx(target, abs=1e-6)


def test_optimal_phase_variance_matches_fock():
    alpha, r = 2.0, 0.6
    sq = SqueezeParams(r, 2 * cmath.phase(alpha))
    reg = ModeRegister.single(T, 60)
    state = displaced_squeezed_state(reg, T, alpha, sq)
    expected = optimal_number_variance(mean_photon(alpha, sq), r)
    assert number_variance(alpha, sq) == pytest.approx(expected, rel=1e-12)
    assert variance(state, number(reg, T)) == pytest.approx(expected, abs=1e-6)


@given(
    st.floats(0.2, 2.0),
    st.floats(-math.pi, math.pi),
    st.floats(0.05, 0.9),
    st.floats(-math.pi, math.pi),
)
def test_moments_match_fock_oracle(mag, phase, r, theta_sq):
    alpha = cmath.rect(mag, phase)
    sq = SqueezeParams(r, theta_sq)
    n = choose_cutoff(alpha, sq, 1e-12)
    reg = ModeRegister.single(T, n)
    state = displaced_squeezed_state(reg, T, alpha, sq)
    assert state.leakage() < 1e-8
    assert 1 - 1e-8 <= state.norm() <= 1 + 1e-12
    mean = mean_photon(alpha, sq)
    var = number_variance(alpha, sq)
    assert expectation(state, number(reg, T)).real == pytest.approx(mean, rel=1e-6)
    assert variance(state, number(reg, T)) == pytest.approx(var, rel=1e-6)


@given(st.floats(0.3, 3.0), st.floats(-math.pi, math.pi), st.floats(0.05, 1.2))
def test_variance_minimised_at_twice_displacement_phase(mag, phase, r):
    alpha = cmath.rect(mag, phase)
    grid = np.linspace(-math.pi, math.pi, 721)
    values = [number_variance(alpha, SqueezeParams(r, 2 * phase + t)) for t in grid]
    best = grid[int(np.argmin(values))]
    assert abs(best) <= grid[1] - grid[0]
    assert min(values) == pytest.approx(optimal_number_variance(mean_photon(alpha, SqueezeParams(r)), r), rel=1e-9)


def test_squeeze_then_displace_order_matters():
    dim = 60
    alpha, xi = 1.0, 0.5
    vac = np.eye(dim)[0]
    ds = displacement_matrix(dim, alpha) @ squeeze_matrix(dim, xi) @ vac
    sd = squeeze_matrix(dim, xi) @ displacement_matrix(dim, alpha) @ vac
    amps = fock_amplitudes(alpha, SqueezeParams(0.5), 30)
    assert np.abs(amps - ds[:30]).max() < 1e-12
    assert np.abs(amps - sd[:30]).max() > 1e-2


def test_squeezed_vacuum_r():
    assert squeezed_vacuum_r(0.0) == 0.0
    for x in (0.1, 1.0, 10.0):
        assert math.sinh(squeezed_vacuum_r(x)) ** 2 == pytest.approx(x, rel=1e-12)
    n = 1e3
    assert math.exp(-2 * squeezed_vacuum_r(n)) == pytest.approx(1 / (4 * n), rel=2 / n)
    with pytest.raises(ValueError):
        squeezed_vacuum_r(-1.0)


def test_displacement_for_and_guard():
    assert displacement_for(4.0, 0.0) == 2.0
    assert displacement_for(math.sinh(1.0) ** 2, 1.0) == pytest.approx(0.0, abs=1e-7)
    with pytest.raises(ValueError):
        displacement_for(1.0, 1.5)


def test_negative_squeeze_rejected():
    with pytest.raises(ValueError):
        SqueezeParams(-0.1)


def test_choose_cutoff_certifies_leakage():
    for alpha, r in ((3.0, 0.0), (0.0, 1.0), (2.0, 1.5)):
        sq = SqueezeParams(r)
        n = choose_cutoff(alpha, sq)
        reg = ModeRegister.single(T, n)
        state = displaced_squeezed_state(reg, T, alpha, sq)
        assert state.leakage() < 1e-12
        assert 1 - state.norm() ** 2 < 1e-12
        smaller = displaced_squeezed_state(ModeRegister.single(T, n - 1), T, alpha, sq)
        # minimality: one level fewer would miss the tolerance
        assert smaller.leakage() + (1 - smaller.norm() ** 2) >= 0.99e-12
