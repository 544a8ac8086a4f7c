"""Coherent and displaced-squeezed single-mode states and their moments."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from .fock import ModeLabel, ModeRegister, StateVector, single_mode_lower

_MAX_WORKING_DIM = 4096


@dataclass(frozen=True)
class SqueezeParams:
    """Squeeze parameter ``xi = r * exp(i * theta_sq)``."""

    r: float = 0.0
    theta_sq: float = 0.0

    def __post_init__(self):
        if not self.r >= 0.0:
            raise ValueError(f"squeeze magnitude r must be nonnegative, got {self.r}")

    @property
    def xi(self) -> complex:
        return self.r * cmath.exp(1j * self.theta_sq)


@dataclass(frozen=True)
class CoherentParams:
    alpha: complex = 0.0

    @property
    def magnitude(self) -> float:
        return abs(self.alpha)

    @property
    def phase(self) -> float:
        return cmath.phase(self.alpha)


AlphaLike = Union[complex, float, CoherentParams]


def _alpha(value: AlphaLike) -> complex:
    return complex(value.alpha if isinstance(value, CoherentParams) else value)


def _squeeze(value: SqueezeParams | None) -> SqueezeParams:
    return value if value is not None else SqueezeParams()


def displacement_generator(dim: int, alpha: complex):
    """Sparse ``alpha a^dag - alpha^* a`` on ``dim`` levels."""
    a = single_mode_lower(dim).astype(complex)
    return (alpha * a.conj().T - np.conj(alpha) * a).tocsr()


def squeeze_generator(dim: int, xi: complex):
    """Sparse ``(xi^* a^2 - xi a^dag^2) / 2`` on ``dim`` levels."""
    a = single_mode_lower(dim).astype(complex)
    ad = a.conj().T
    return (0.5 * (np.conj(xi) * (a @ a) - xi * (ad @ ad))).tocsr()


def displacement_matrix(dim: int, alpha: complex) -> np.ndarray:
    """Dense ``exp(alpha a^dag - alpha^* a)`` on ``dim`` levels (truncated generator)."""
    return expm(displacement_generator(dim, alpha).toarray())


def squeeze_matrix(dim: int, xi: complex) -> np.ndarray:
    """Dense ``exp((xi^* a^2 - xi a^dag^2) / 2)`` on ``dim`` levels."""
    return expm(squeeze_generator(dim, xi).toarray())


@lru_cache(maxsize=256)
def _working_state(alpha: complex, xi: complex, dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=complex)
    vec[0] = 1.0
    # only the action on one vector is needed, so skip forming the exponentials
    if xi != 0:
        vec = expm_multiply(squeeze_generator(dim, xi), vec)
    if alpha != 0:
        vec = expm_multiply(displacement_generator(dim, alpha), vec)
    vec.setflags(write=False)
    return vec


def _initial_working_dim(alpha: complex, sq: SqueezeParams) -> int:
    nbar = mean_photon(alpha, sq)
    spread = math.sqrt(max(number_variance(alpha, sq), 0.0))
    return int(nbar + 12.0 * spread + 40)


def fock_amplitudes(alpha: AlphaLike, sq: SqueezeParams | None, cutoff: int) -> np.ndarray:
    """Amplitudes ``<n|D(alpha) Q(xi)|0>`` for ``n < cutoff``.

    The exponentials act in a padded space that is grown until the
    padding holds no probability, so the returned amplitudes are those of
    the untruncated state; the missing tail lowers the norm below one.
    """
    alpha = _alpha(alpha)
    sq = _squeeze(sq)
    dim = max(_initial_working_dim(alpha, sq), 2 * cutoff, cutoff + 40)
    while True:
        vec = _working_state(alpha, sq.xi, dim)
        if float(np.sum(np.abs(vec[(3 * dim) // 4 :]) ** 2)) < 1e-26:
            break
        if dim >= _MAX_WORKING_DIM:
            raise ValueError(
                f"state with alpha={alpha}, r={sq.r} needs more than {_MAX_WORKING_DIM} levels"
            )
        dim = min(2 * dim, _MAX_WORKING_DIM)
    return np.array(vec[:cutoff])


def choose_cutoff(alpha: AlphaLike, sq: SqueezeParams | None = None, tol: float = 1e-12, minimum: int = 3) -> int:
    """Smallest cutoff whose top two levels plus discarded tail hold less than ``tol``."""
    alpha = _alpha(alpha)
    sq = _squeeze(sq)
    dim = _initial_working_dim(alpha, sq)
    while True:
        probs = np.abs(fock_amplitudes(alpha, sq, dim)) ** 2
        # P(n >= k), with the mass beyond ``dim`` restored from the norm deficit
        tail = np.cumsum(probs[::-1])[::-1] + max(0.0, 1.0 - probs.sum())
        for n in range(max(minimum, 2), dim // 2):
            if tail[n - 2] < tol:
                return n
        if dim >= _MAX_WORKING_DIM:
            raise ValueError(f"no cutoff below {_MAX_WORKING_DIM} reaches tolerance {tol}")
        dim = min(2 * dim, _MAX_WORKING_DIM)


def displaced_squeezed_state(
    register: ModeRegister,
    mode: ModeLabel,
    alpha: AlphaLike = 0.0,
    sq: SqueezeParams | None = None,
) -> StateVector:
    """``D(alpha) Q(xi)|0>`` in ``mode``, vacuum in every other mode."""
    amps = fock_amplitudes(alpha, sq, register.cutoff(mode))
    return StateVector.product(register, {mode: amps})


def coherent_state(register: ModeRegister, mode: ModeLabel, alpha: AlphaLike) -> StateVector:
    return displaced_squeezed_state(register, mode, alpha, None)


def mean_photon(alpha: AlphaLike, sq: SqueezeParams | None = None) -> float:
    sq = _squeeze(sq)
    return abs(_alpha(alpha)) ** 2 + math.sinh(sq.r) ** 2


def number_variance(alpha: AlphaLike, sq: SqueezeParams | None = None) -> float:
    """Photon-number variance of ``D(alpha) Q(xi)|0>`` for arbitrary squeeze phase."""
    alpha = _alpha(alpha)
    sq = _squeeze(sq)
    ch, sh = math.cosh(sq.r), math.sinh(sq.r)
    theta = cmath.phase(alpha)
    n_coh = mean_photon(alpha, sq) - sh * sh
    factor = abs(ch - cmath.exp(1j * (sq.theta_sq - 2.0 * theta)) * sh) ** 2
    return n_coh * factor + 2.0 * ch * ch * sh * sh


def optimal_number_variance(n_bar: float, r: float) -> float:
    """Number variance with the squeeze phase at its minimising value (``theta_sq = 2 arg alpha``)."""
    sh2 = math.sinh(r) ** 2
    return (n_bar - sh2) * math.exp(-2.0 * r) + 2.0 * math.cosh(r) ** 2 * sh2


def squeezed_vacuum_r(n_bar: float) -> float:
    """Squeeze magnitude whose vacuum has mean photon number ``n_bar``."""
    if n_bar < 0:
        raise ValueError(f"mean photon number must be nonnegative, got {n_bar}")
    return math.asinh(math.sqrt(n_bar))


def displacement_for(n_bar: float, r: float) -> float:
    """Displacement magnitude giving total mean photon number ``n_bar`` at squeeze ``r``."""
    rest = n_bar - math.sinh(r) ** 2
    if rest < -1e-12 * max(1.0, n_bar):
        raise ValueError(f"sinh^2(r) = {math.sinh(r) ** 2:.6g} exceeds n_bar = {n_bar:.6g}")
    return math.sqrt(max(rest, 0.0))
