import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from sqzradar import closed_forms as cf
from sqzradar.errors import TruncationError
from sqzradar.fock import FrequencyTag, LinearOperator, ModeLabel, ModeRegister, StateVector, number
from sqzradar.scenarios import DetectionScenario, Hypothesis, HypothesisPair, Kind, ScenarioParams, build
from sqzradar.snr import (
    REL_ERROR_FLOOR,
    TruncationWarning,
    equivalent_snr,
    gaussian_tail,
    min_detectable_angle,
    relative_error,
    roc_point,
)

T = ModeLabel(FrequencyTag.T)


def tail_by_integration(x):
    return quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), x, math.inf)[0]


def test_identical_hypotheses():
    reg = ModeRegister.single(T, 4)
    vac = StateVector.vacuum(reg)
    op = number(reg, T) + LinearOperator.identity(reg)
    assert equivalent_snr(HypothesisPair(vac, vac, op, Hypothesis.H0)).snr_numeric == 0.0


def test_zero_variance_gives_infinity_with_diagnostic():
    reg = ModeRegister.single(T, 4)
    pair = HypothesisPair(StateVector.vacuum(reg), StateVector.basis(reg, [1]), number(reg, T), Hypothesis.H0)
    rep = equivalent_snr(pair)
    assert math.isinf(rep.snr_numeric)
    assert "zero variance" in rep.diagnostic


def test_direct_detection_example():
    rep = equivalent_snr(build(DetectionScenario(Kind.DIRECT_TARGET, ScenarioParams(beta_t=3.0))))
    assert rep.snr_numeric == pytest.approx(9.0, abs=1e-6)
    assert rep.variance_hypothesis is Hypothesis.H1


def test_heterodyne_example():
    sc = DetectionScenario(Kind.HETERODYNE_TARGET, ScenarioParams(alpha_lo=10, beta_t=1, r=0.5))
    rep = equivalent_snr(build(sc))
    expected = cf.snr_heterodyne(1.0, 100 + math.sinh(0.5) ** 2, 0.5, 0.0)
    assert rep.snr_numeric == pytest.approx(expected, rel=1e-6)


def test_leakage_error_and_warning():
    small = DetectionScenario(Kind.DIRECT_TARGET, ScenarioParams(beta_t=2.0), cutoff=10)
    with pytest.raises(TruncationError, match="leakage"):
        equivalent_snr(build(small))
    borderline = DetectionScenario(Kind.DIRECT_TARGET, ScenarioParams(beta_t=1.0), cutoff=12)
    with pytest.warns(TruncationWarning):
        equivalent_snr(build(borderline))
    fine = DetectionScenario(Kind.DIRECT_TARGET, ScenarioParams(beta_t=1.0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        equivalent_snr(build(fine))


def test_relative_error_floor():
    assert relative_error(1.0, 0.0) == pytest.approx(1.0 / REL_ERROR_FLOOR)
    assert relative_error(2.0, 1.0) == 1.0
    assert relative_error(math.inf, math.inf) == 0.0


@given(st.floats(-5, 5), st.floats(-3, 3).filter(lambda c: abs(c) > 1e-3))
def test_affine_rescaling_invariance(shift, scale):
    sc = DetectionScenario(Kind.HETERODYNE_TARGET, ScenarioParams(alpha_lo=1.5, beta_t=0.7, r=0.2))
    pair = build(sc)
    ident = LinearOperator.identity(pair.register)
    moved = HypothesisPair(pair.psi0, pair.psi1, pair.signal_op * scale + ident * shift, pair.variance_hypothesis)
    assert equivalent_snr(moved).snr_numeric == pytest.approx(equivalent_snr(pair).snr_numeric, rel=1e-8)


# ---------------------------------------------------------------------------
# ROC


def test_gaussian_tail_is_not_mathematical_erfc():
    for x in (-1.0, 0.0, 0.7, 2.5):
        assert gaussian_tail(x) == pytest.approx(tail_by_integration(x), abs=1e-12)
        assert gaussian_tail(x) == pytest.approx(0.5 * math.erfc(x / math.sqrt(2)), abs=1e-15)


def test_roc_examples():
    assert roc_point(3.0, 2, 0.0).q0 == 0.5
    for m in (1, 3):
        for x in (-1.0, 0.3, 2.0):
            p = roc_point(0.0, m, x)
            assert p.qd == p.q0
    x = brentq(lambda t: tail_by_integration(t) - 0.05, 0, 5, xtol=1e-14)
    assert x == pytest.approx(1.6449, abs=1e-4)
    p = roc_point(4.0, 4, x)
    assert p.q0 == pytest.approx(0.05, abs=1e-12)
    assert p.qd == pytest.approx(tail_by_integration(x - 4.0), abs=1e-12)


def test_roc_rejects_bad_inputs():
    with pytest.raises(ValueError):
        roc_point(-1.0, 1, 0.0)
    with pytest.raises(ValueError):
        roc_point(1.0, 0, 0.0)


@given(st.floats(0, 20), st.integers(1, 50), st.floats(-4, 6))
def test_roc_point_properties(d2, m, x):
    p = roc_point(d2, m, x)
    assert 0 <= p.q0 <= 1 and 0 <= p.qd <= 1
    assert p.qd >= p.q0
    assert roc_point(d2, m + 1, x).qd >= p.qd
    assert roc_point(d2 + 1, m, x).qd >= p.qd


@given(st.floats(0.1, 5))
def test_detection_is_even_odds_at_threshold(x):
    assert roc_point(x * x, 1, x).qd == pytest.approx(0.5, abs=1e-15)


# ---------------------------------------------------------------------------
# minimum detectable angle


def test_min_detectable_angle_examples():
    assert min_detectable_angle(1.0, 1e-6, 0.1) == pytest.approx(1e-6 / 0.2)
    assert min_detectable_angle(100.0, 1e-6, 0.1) == pytest.approx(5e-7, rel=1e-12)


@given(st.floats(0.1, 1e4), st.floats(1e-7, 1e-5), st.floats(1e-3, 1.0))
def test_min_detectable_angle_gives_unit_snr(n_t, lam, d):
    angle = min_detectable_angle(n_t, lam, d)
    assert cf.snr_split_direct_angular(angle, d, lam, n_t) == pytest.approx(1.0, abs=1e-12)


def test_min_detectable_angle_rejects_nonpositive():
    with pytest.raises(ValueError):
        min_detectable_angle(0.0, 1e-6, 0.1)


def test_cutoff_far_below_photon_number_is_caught():
    # almost no weight reaches the top levels, but most of the norm is gone
    sc = DetectionScenario(Kind.HETERODYNE_TARGET, ScenarioParams(alpha_lo=6.0, beta_t=1.0), cutoff=8)
    pair = build(sc)
    assert pair.psi0.leakage() < 1e-6
    with pytest.raises(TruncationError, match="norm lost"):
        equivalent_snr(pair)
