import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqzradar.errors import DimensionCapError, NonHermitianError, RegisterMismatchError, UnknownModeError
from sqzradar.fock import (
    FrequencyTag,
    LinearOperator,
    ModeLabel,
    ModeRegister,
    PortTag,
    StateVector,
    expectation,
    hop,
    ladder_lower,
    ladder_raise,
    leakage,
    number,
    operator_sum,
    variance,
)

T = ModeLabel(FrequencyTag.T)
LO = ModeLabel(FrequencyTag.LO)
IMG = ModeLabel(FrequencyTag.IMAGE)


def coherent_amplitudes(alpha, n):
    k = np.arange(n)
    log_fact = np.array([math.lgamma(x + 1) for x in k])
    mag = np.exp(-abs(alpha) ** 2 / 2 + k * np.log(abs(alpha)) - 0.5 * log_fact) if alpha else (k == 0).astype(float)
    return mag * np.exp(1j * k * np.angle(alpha))


def single(n):
    return ModeRegister.single(T, n)


# ---------------------------------------------------------------------------
# registers and labels


def test_labels_must_be_unique():
    with pytest.raises(ValueError):
        ModeRegister((T, T), 3)


def test_label_fields_are_validated():
    with pytest.raises(ValueError):
        ModeLabel(FrequencyTag.T, 2)
    assert ModeLabel("LO", 1, "T-port").port_tag is PortTag.T_PORT


def test_dimension_cap():
    with pytest.raises(DimensionCapError):
        ModeRegister((T, LO, IMG), 101)
    reg = ModeRegister((T, LO, IMG), 100)
    assert reg.dim == 10**6
    with pytest.raises(DimensionCapError):
        ModeRegister((T, LO), 20, max_dim=300)


def test_cutoff_at_least_two():
    with pytest.raises(ValueError):
        ModeRegister((T,), 1)


def test_per_mode_cutoffs():
    reg = ModeRegister((T, LO), (3, 5))
    assert reg.dims == (3, 5) and reg.dim == 15 and reg.cutoff(LO) == 5


def test_unknown_mode():
    with pytest.raises(UnknownModeError):
        ladder_lower(single(4), LO)


# ---------------------------------------------------------------------------
# ladder operators


def test_lower_on_one_gives_vacuum():
    reg = single(4)
    out = ladder_lower(reg, T).apply(StateVector.basis(reg, [1]))
    assert np.allclose(out.amplitudes, StateVector.vacuum(reg).amplitudes)


def test_lower_on_vacuum_is_zero():
    reg = single(4)
    assert np.allclose(ladder_lower(reg, T).apply(StateVector.vacuum(reg)).amplitudes, 0)


def test_lower_on_four():
    reg = single(6)
    out = ladder_lower(reg, T).apply(StateVector.basis(reg, [4]))
    assert np.allclose(out.amplitudes, 2 * StateVector.basis(reg, [3]).amplitudes)


def test_raise_on_vacuum_and_top_level():
    reg = single(5)
    up = ladder_raise(reg, T)
    assert np.allclose(up.apply(StateVector.vacuum(reg)).amplitudes, StateVector.basis(reg, [1]).amplitudes)
    # hard cutoff: the top level has nowhere to go
    assert np.allclose(up.apply(StateVector.basis(reg, [4])).amplitudes, 0)


def test_raise_is_adjoint_of_lower():
    reg = ModeRegister((T, LO), (4, 3))
    for mode in (T, LO):
        diff = ladder_raise(reg, mode).matrix - ladder_lower(reg, mode).matrix.conj().T
        assert abs(diff).sum() == 0


@pytest.mark.parametrize("n", [2, 5, 8])
def test_commutator_is_one_below_cutoff(n):
    reg = ModeRegister((T, LO), (n, 3))
    a = ladder_lower(reg, T).dense()
    ad = ladder_raise(reg, T).dense()
    comm = a @ ad - ad @ a
    diag = np.diag(comm).reshape(reg.dims)
    # sqrt(n)^2 is exact only up to rounding
    assert np.abs(diag[: n - 1] - 1.0).max() < 1e-13
    # the truncation shows up only on the top level
    assert np.allclose(diag[n - 1], 1 - n)


def test_operators_on_distinct_modes_commute():
    reg = ModeRegister((T, LO, IMG), (3, 4, 2))
    ops = [ladder_lower(reg, m) for m in (T, LO, IMG)] + [ladder_raise(reg, m) for m in (T, LO, IMG)]
    for i, x in enumerate(ops):
        for j, y in enumerate(ops):
            if i % 3 != j % 3:
                assert (x @ y - y @ x).matrix.nnz == 0


def test_hop_is_raise_times_lower():
    reg = ModeRegister((T, LO), 4)
    direct = hop(reg, T, LO).dense()
    assert np.allclose(direct, ladder_raise(reg, T).dense() @ ladder_lower(reg, LO).dense())
    assert np.allclose(hop(reg, T, T).dense(), number(reg, T).dense())


# ---------------------------------------------------------------------------
# expectation, variance, leakage


def test_number_expectations():
    reg = single(6)
    n = number(reg, T)
    assert expectation(StateVector.vacuum(reg), n) == 0
    assert expectation(StateVector.basis(reg, [1]), n) == pytest.approx(1)


def test_coherent_mean_photon_number():
    reg = single(32)
    state = StateVector.product(reg, {T: coherent_amplitudes(1.5, 32)})
    assert expectation(state, number(reg, T)).real == pytest.approx(2.25, abs=1e-8)


def test_coherent_number_variance_is_poisson():
    reg = single(40)
    state = StateVector.product(reg, {T: coherent_amplitudes(2.0, 40)})
    assert variance(state, number(reg, T)) == pytest.approx(4.0, abs=1e-6)


def test_vacuum_variance_is_zero():
    reg = single(5)
    assert variance(StateVector.vacuum(reg), number(reg, T)) == 0.0


def test_variance_rejects_non_hermitian():
    reg = single(5)
    with pytest.raises(NonHermitianError):
        variance(StateVector.vacuum(reg), ladder_lower(reg, T))


def test_register_mismatch():
    with pytest.raises(RegisterMismatchError):
        expectation(StateVector.vacuum(single(4)), number(single(5), T))
    with pytest.raises(RegisterMismatchError):
        number(single(4), T) + number(single(5), T)


def test_leakage_examples():
    reg = single(40)
    assert leakage(StateVector.vacuum(reg)) == 0
    assert leakage(StateVector.basis(reg, [39])) == 1
    assert leakage(StateVector.product(reg, {T: coherent_amplitudes(2.0, 40)})) < 1e-10


def test_product_state_truncates_without_renormalising():
    reg = single(4)
    state = StateVector.product(reg, {T: coherent_amplitudes(2.0, 30)})
    assert state.norm() < 1
    assert np.allclose(state.amplitudes, coherent_amplitudes(2.0, 4))


def test_product_state_ordering():
    reg = ModeRegister((T, LO), (3, 2))
    state = StateVector.product(reg, {LO: np.array([0, 1])})
    assert np.allclose(state.amplitudes, StateVector.basis(reg, [0, 1]).amplitudes)
    assert np.allclose(state.marginal(LO), [0, 1])


def test_states_are_read_only():
    state = StateVector.vacuum(single(3))
    with pytest.raises(ValueError):
        state.amplitudes[0] = 2


def test_operator_algebra():
    reg = single(4)
    n = number(reg, T)
    ident = LinearOperator.identity(reg)
    combo = operator_sum(reg, [(2.0, n), (-1.0, ident)])
    assert np.allclose(combo.dense(), (2 * n - ident).dense())
    assert np.allclose((-n).dense(), -n.dense())
    assert LinearOperator.zero(reg).is_hermitian()


@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=9, max_size=9))
def test_hermitian_expectation_is_real(coeffs):
    reg = ModeRegister((T, LO), 3)
    amps = np.array(coeffs)
    if np.linalg.norm(amps) < 1e-6:
        amps = np.eye(9)[0].astype(complex)
    state = StateVector(reg, amps / np.linalg.norm(amps))
    op = operator_sum(reg, [(1.0, hop(reg, T, LO)), (1.0, hop(reg, LO, T)), (0.5, number(reg, T))])
    assert op.is_hermitian()
    value = expectation(state, op)
    assert abs(value.imag) < 1e-12
    assert variance(state, op) >= 0.0


@given(st.floats(0, 2.5), st.floats(-math.pi, math.pi))
def test_coherent_number_mean_property(mag, phase):
    n = 60
    reg = single(n)
    alpha = mag * np.exp(1j * phase)
    state = StateVector.product(reg, {T: coherent_amplitudes(alpha, n)})
    assert expectation(state, number(reg, T)).real == pytest.approx(mag**2, abs=1e-9)
