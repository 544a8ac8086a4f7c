"""Truncated multimode Fock space: registers, states, sparse operators.

Basis ordering follows ``numpy.kron``: mode 0 is the most significant
tensor factor, so ``amplitudes.reshape(register.dims)`` has one axis per
mode in register order.

Truncation is a hard cutoff: with ``N`` levels per mode the raising
operator maps ``|N-1>`` to zero.  Results are only trusted when
:func:`leakage` (probability in the top two levels of any mode) is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionCapError,
    NonHermitianError,
    RegisterMismatchError,
    UnknownModeError,
)

DEFAULT_DIM_CAP = 10**6
HERMITIAN_TOL = 1e-12


class FrequencyTag(str, Enum):
    """Symbolic optical frequency of a mode.

    ``AUX`` is the upper heterodyne partner of the target return
    (``omega_T + omega_H``); it only carries noise when the target mode is
    occupied under the hypothesis used for the variance.
    """

    T = "T"
    LO = "LO"
    IMAGE = "IMAGE"
    AUX = "AUX"


class PortTag(str, Enum):
    DIRECT = "direct"
    IN = "in"
    VAC = "vac"
    T_PORT = "T-port"
    LO_PORT = "LO-port"


@dataclass(frozen=True)
class ModeLabel:
    frequency_tag: FrequencyTag
    transverse_index: int = 0
    port_tag: PortTag = PortTag.DIRECT

    def __post_init__(self):
        object.__setattr__(self, "frequency_tag", FrequencyTag(self.frequency_tag))
        object.__setattr__(self, "port_tag", PortTag(self.port_tag))
        if self.transverse_index not in (0, 1):
            raise ValueError(f"transverse index must be 0 or 1, got {self.transverse_index}")

    def __str__(self):
        return f"{self.frequency_tag.value}/u{self.transverse_index}/{self.port_tag.value}"


@dataclass(frozen=True)
class ModeRegister:
    """Ordered modes with a Fock cutoff per mode.

    ``cutoffs`` may be given as a single integer, applied to every mode.
    """

    modes: tuple[ModeLabel, ...]
    cutoffs: Union[int, tuple[int, ...]]
    max_dim: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        modes = tuple(self.modes)
        if isinstance(self.cutoffs, (int, np.integer)):
            cutoffs = (int(self.cutoffs),) * len(modes)
        else:
            cutoffs = tuple(int(c) for c in self.cutoffs)
        if len(cutoffs) != len(modes):
            raise ValueError("one cutoff per mode required")
        if len(set(modes)) != len(modes):
            raise ValueError("mode labels within a register must be unique")
        if any(c < 2 for c in cutoffs):
            raise ValueError("cutoff must be at least 2")
        dim = math.prod(cutoffs)
        if dim > self.max_dim:
            raise DimensionCapError(
                f"register dimension {dim} exceeds cap {self.max_dim} (cutoffs {cutoffs})"
            )
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "cutoffs", cutoffs)

    @classmethod
    def single(cls, label: ModeLabel | None = None, cutoff: int = 10) -> "ModeRegister":
        return cls((label or ModeLabel(FrequencyTag.T),), cutoff)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.cutoffs

    @property
    def dim(self) -> int:
        return math.prod(self.cutoffs)

    def __len__(self):
        return len(self.modes)

    def __contains__(self, mode):
        return mode in self.modes

    def index(self, mode: ModeLabel) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise UnknownModeError(f"mode {mode} not in register") from None

    def cutoff(self, mode: ModeLabel) -> int:
        return self.cutoffs[self.index(mode)]

    def appended(self, mode: ModeLabel, cutoff: int) -> "ModeRegister":
        return ModeRegister(self.modes + (mode,), self.cutoffs + (cutoff,), self.max_dim)


def _check_same_register(a: ModeRegister, b: ModeRegister):
    if a != b:
        raise RegisterMismatchError("operands are defined on different registers")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state with dense complex amplitudes (read-only)."""

    register: ModeRegister
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.register.dim:
            raise ValueError(
                f"expected {self.register.dim} amplitudes, got {amps.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def vacuum(cls, register: ModeRegister) -> "StateVector":
        amps = np.zeros(register.dim, dtype=complex)
        amps[0] = 1.0
        return cls(register, amps)

    @classmethod
    def basis(cls, register: ModeRegister, occupations: Sequence[int]) -> "StateVector":
        amps = np.zeros(register.dim, dtype=complex)
        amps[np.ravel_multi_index(tuple(occupations), register.dims)] = 1.0
        return cls(register, amps)

    @classmethod
    def product(
        cls, register: ModeRegister, factors: Mapping[ModeLabel, np.ndarray]
    ) -> "StateVector":
        """Tensor product of single-mode amplitude vectors; absent modes are vacuum.

        Longer factors are truncated to the register cutoff (the lost tail
        shows up as a norm deficit, never as renormalisation).
        """
        for mode in factors:
            register.index(mode)
        amps = np.ones(1, dtype=complex)
        for mode, n in zip(register.modes, register.cutoffs):
            vec = np.zeros(n, dtype=complex)
            if mode in factors:
                src = np.asarray(factors[mode], dtype=complex)
                k = min(n, src.size)
                vec[:k] = src[:k]
            else:
                vec[0] = 1.0
            amps = np.kron(amps, vec)
        return cls(register, amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.register.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        _check_same_register(self.register, other.register)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.inner(other)) ** 2

    def marginal(self, mode: ModeLabel) -> np.ndarray:
        """Photon-number distribution of one mode."""
        axis = self.register.index(mode)
        probs = np.abs(self.tensor()) ** 2
        other = tuple(i for i in range(len(self.register)) if i != axis)
        return probs.sum(axis=other) if other else probs

    def leakage(self) -> float:
        return leakage(self)


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """Sparse operator on a register's tensor basis."""

    register: ModeRegister
    matrix: sp.csr_matrix = field(repr=False)

    def __post_init__(self):
        mat = sp.csr_matrix(self.matrix, dtype=complex)
        if mat.shape != (self.register.dim, self.register.dim):
            raise ValueError(f"operator shape {mat.shape} does not match register")
        mat.sum_duplicates()
        mat.eliminate_zeros()
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, register: ModeRegister) -> "LinearOperator":
        return cls(register, sp.identity(register.dim, dtype=complex, format="csr"))

    @classmethod
    def zero(cls, register: ModeRegister) -> "LinearOperator":
        return cls(register, sp.csr_matrix((register.dim, register.dim), dtype=complex))

    def adjoint(self) -> "LinearOperator":
        return LinearOperator(self.register, self.matrix.conj().T)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    @cached_property
    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        scale = max(1.0, float(abs(self.matrix).max()) if self.matrix.nnz else 0.0)
        return self.hermiticity_error <= tol * scale

    def apply(self, state: StateVector) -> StateVector:
        _check_same_register(self.register, state.register)
        return StateVector(self.register, self.matrix @ state.amplitudes)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return self.apply(other)
        if isinstance(other, LinearOperator):
            _check_same_register(self.register, other.register)
            return LinearOperator(self.register, self.matrix @ other.matrix)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        _check_same_register(self.register, other.register)
        return LinearOperator(self.register, self.matrix + other.matrix)

    def __sub__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        _check_same_register(self.register, other.register)
        return LinearOperator(self.register, self.matrix - other.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex, np.number)):
            return LinearOperator(self.register, self.matrix * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1


def single_mode_lower(cutoff: int) -> sp.csr_matrix:
    """Annihilation operator on levels ``0..cutoff-1``."""
    return sp.diags(np.sqrt(np.arange(1, cutoff)), 1, shape=(cutoff, cutoff), format="csr", dtype=complex)


def embed(register: ModeRegister, mode: ModeLabel, local: sp.spmatrix) -> LinearOperator:
    """Place a single-mode operator into the tensor basis, identity elsewhere."""
    axis = register.index(mode)
    left = math.prod(register.dims[:axis])
    right = math.prod(register.dims[axis + 1 :])
    mat = sp.kron(sp.identity(left, format="csr"), local, format="csr")
    mat = sp.kron(mat, sp.identity(right, format="csr"), format="csr")
    return LinearOperator(register, mat)


def ladder_lower(register: ModeRegister, mode: ModeLabel) -> LinearOperator:
    return embed(register, mode, single_mode_lower(register.cutoff(mode)))


def ladder_raise(register: ModeRegister, mode: ModeLabel) -> LinearOperator:
    return embed(register, mode, single_mode_lower(register.cutoff(mode)).conj().T.tocsr())


def number(register: ModeRegister, mode: ModeLabel) -> LinearOperator:
    n = register.cutoff(mode)
    return embed(register, mode, sp.diags(np.arange(n, dtype=complex), 0, format="csr"))


def hop(register: ModeRegister, to_mode: ModeLabel, from_mode: ModeLabel) -> LinearOperator:
    """``a_to^dagger a_from`` (the number operator when both labels agree)."""
    if to_mode == from_mode:
        return number(register, to_mode)
    return ladder_raise(register, to_mode) @ ladder_lower(register, from_mode)


def expectation(state: StateVector, op: LinearOperator) -> complex:
    """``<psi|O|psi>`` without renormalising the truncated state."""
    _check_same_register(state.register, op.register)
    return complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))


def variance(state: StateVector, op: LinearOperator) -> float:
    """``<O^2> - <O>^2`` for Hermitian ``O``; ``<O^2>`` is taken as ``|O psi|^2``."""
    _check_same_register(state.register, op.register)
    if not op.is_hermitian():
        raise NonHermitianError(
            f"variance needs a Hermitian operator (max |O - O^H| = {op.hermiticity_error:.3g})"
        )
    phi = op.matrix @ state.amplitudes
    mean = np.vdot(state.amplitudes, phi).real
    second = np.vdot(phi, phi).real
    var = second - mean * mean
    if var < 0.0 and var >= -HERMITIAN_TOL * max(1.0, second):
        var = 0.0
    return float(var)


def leakage(state: StateVector) -> float:
    """Largest probability held in the top two Fock levels of any single mode."""
    probs = np.abs(state.tensor()) ** 2
    worst = 0.0
    for axis in range(probs.ndim):
        other = tuple(i for i in range(probs.ndim) if i != axis)
        marg = probs.sum(axis=other) if other else probs
        worst = max(worst, float(marg[-2:].sum()))
    return worst


def operator_sum(register: ModeRegister, terms: Iterable[tuple[complex, LinearOperator]]) -> LinearOperator:
    mat = sp.csr_matrix((register.dim, register.dim), dtype=complex)
    for coeff, op in terms:
        _check_same_register(register, op.register)
        mat = mat + coeff * op.matrix
    return LinearOperator(register, mat)
