"""Analytic SNR expressions for every detection scenario.

All functions are in natural units (photon numbers) except the
conventional-parameter heterodyne form, which takes SI inputs.  Phase
arguments are the combined angle the expression depends on, for example
``theta_T - theta_LO + theta_H`` for heterodyne detection.  The squeeze
phase is always taken at its noise-minimising value unless a function says
otherwise.

Every form that has an LO rejects ``sinh(r)^2 > n_lo``: an LO cannot hold
fewer photons than its squeezed-vacuum part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import hbar

from .gaussian import SqueezeParams, number_variance, optimal_number_variance

_DOMAIN_TOL = 1e-12


def _sinh2(r: float) -> float:
    return math.sinh(r) ** 2


def _check_nonneg(**values):
    for name, value in values.items():
        if value < 0:
            raise ValueError(f"{name} must be nonnegative, got {value}")


def _check_lo(n_lo: float, r: float):
    _check_nonneg(n_lo=n_lo, r=r)
    if _sinh2(r) > n_lo + _DOMAIN_TOL * max(1.0, n_lo):
        raise ValueError(f"sinh^2(r) = {_sinh2(r):.6g} exceeds the LO photon number {n_lo:.6g}")


def _lo_factor(n_lo: float, r: float) -> float:
    """``1 - sinh^2 r / n_lo``: the fraction of LO photons that are coherent."""
    _check_lo(n_lo, r)
    if n_lo == 0:
        return 0.0
    return max(0.0, 1.0 - _sinh2(r) / n_lo)


def _bracket(n_t: float, n_lo: float, r: float, noise_share: float) -> float:
    """``(1 - sinh^2 r/n_lo) / (1 + noise_share * n_t (1 + e^{-2r}) / n_lo)``."""
    top = _lo_factor(n_lo, r)
    if top == 0.0:
        return 0.0
    return top / (1.0 + noise_share * n_t * (1.0 + math.exp(-2.0 * r)) / n_lo)


@dataclass(frozen=True)
class SqueezeNoiseTerm:
    """Noise reduction ``e^{-2r}`` carried by the squeezed quadrature."""

    r: float

    def __post_init__(self):
        _check_nonneg(r=self.r)

    @property
    def reduction(self) -> float:
        return math.exp(-2.0 * self.r)


# ---------------------------------------------------------------------------
# heterodyne detection of a target return


def snr_heterodyne(n_t: float, n_lo: float, r: float, phase: float) -> float:
    """Heterodyne SNR with a squeezed LO: ``2 (1 - sinh^2 r / n_lo) n_t cos^2 phase``."""
    _check_nonneg(n_t=n_t)
    return 2.0 * _lo_factor(n_lo, r) * n_t * math.cos(phase) ** 2


def snr_heterodyne_lossy(n_t: float, n_lo: float, r: float, phase_total: float, eta: float) -> float:
    """Heterodyne SNR with quantum efficiency ``eta`` on the target return.

    ``phase_total`` already includes the transmission phase of the loss.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return eta * snr_heterodyne(n_t, n_lo, r, phase_total)


@dataclass(frozen=True)
class RadarLinkParams:
    """Physical link description in SI units.

    The quantization length ``L`` fixes the quantization time ``T = L / c``
    and the effective bandwidth ``B = 1 / (2 T)``.  A beam of power ``P``
    holds ``P T / (hbar omega)`` photons per quantization volume, which is
    the mapping ``P = hbar omega n c A / V`` with ``V = L A``.
    """

    p_t: float
    p_lo: float
    omega: float
    area: float
    quantization_length: float

    def __post_init__(self):
        for name in ("p_t", "p_lo", "omega", "area", "quantization_length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def from_bandwidth(cls, p_t: float, p_lo: float, omega: float, area: float, bandwidth: float) -> "RadarLinkParams":
        if not bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {bandwidth}")
        return cls(p_t, p_lo, omega, area, SPEED_OF_LIGHT / (2.0 * bandwidth))

    @property
    def quantization_time(self) -> float:
        return self.quantization_length / SPEED_OF_LIGHT

    @property
    def bandwidth(self) -> float:
        return 1.0 / (2.0 * self.quantization_time)

    @property
    def volume(self) -> float:
        return self.area * self.quantization_length

    def photon_number(self, power: float) -> float:
        return power * self.quantization_time / (hbar * self.omega)

    @property
    def n_t(self) -> float:
        return self.photon_number(self.p_t)

    @property
    def n_lo(self) -> float:
        return self.photon_number(self.p_lo)


def snr_heterodyne_conventional(link: RadarLinkParams, r: float, n_lo: float | None = None, phase: float = 0.0) -> float:
    """``P_T / (hbar omega B) cos^2 phase (1 - sinh^2 r / n_lo)``.

    ``n_lo`` defaults to the LO photon number implied by ``link.p_lo``.
    """
    if n_lo is None:
        n_lo = link.n_lo
    shot = link.p_t / (hbar * link.omega * link.bandwidth)
    return shot * math.cos(phase) ** 2 * _lo_factor(n_lo, r)


def mode_count(wavelength: float, l_tr: float, omega_fov: float) -> int:
    """Number of transverse modes inside the field of view, at least one."""
    if not wavelength > 0 or not l_tr > 0:
        raise ValueError("wavelength and transverse size must be positive")
    _check_nonneg(omega_fov=omega_fov)
    x = (l_tr / wavelength) ** 2 * omega_fov
    # guard against x landing a hair below an integer through rounding
    return max(int(math.floor(x * (1.0 + 1e-12))), 1)


# ---------------------------------------------------------------------------
# split detector


def snr_split_direct(delta: float, w: float, n_t: float) -> float:
    """Split-detector direct detection of a displaced beam: ``(2 delta / W)^2 n_t``."""
    if not w > 0:
        raise ValueError(f"beam width must be positive, got {w}")
    _check_nonneg(delta=delta, n_t=n_t)
    return (2.0 * delta / w) ** 2 * n_t


def snr_split_direct_angular(delta_theta: float, d_aperture: float, wavelength: float, n_t: float) -> float:
    """Angular form of :func:`snr_split_direct` with ``delta = f dtheta`` and ``W = f lambda / d``."""
    if not d_aperture > 0 or not wavelength > 0:
        raise ValueError("aperture and wavelength must be positive")
    _check_nonneg(n_t=n_t)
    return (2.0 * d_aperture * delta_theta / wavelength) ** 2 * n_t


def snr_split_homodyne_two_mode(delta: float, w: float, n_t: float, n_lo: float, r: float, phase: float) -> float:
    """Split-detector homodyne with an even squeezed LO and a flipped target beam.

    ``phase`` is ``theta_T - theta_LO``.
    """
    if not w > 0:
        raise ValueError(f"beam width must be positive, got {w}")
    _check_nonneg(delta=delta, n_t=n_t)
    _check_lo(n_lo, r)
    coherent_lo = math.sqrt(max(n_lo - _sinh2(r), 0.0))
    top = (n_t - 3.0 * coherent_lo * math.sqrt(n_t) * math.cos(phase)) ** 2
    bottom = n_lo + n_t * math.exp(-2.0 * r)
    if bottom == 0.0:
        return math.inf if top > 0 else 0.0
    return (2.0 * delta / w) ** 2 * top / bottom


def snr_split_homodyne_squeezed_vacuum_lo(delta: float, w: float, n_t: float, n_lo: float) -> float:
    """Large-``n_lo`` limit of the two-mode form when the LO is a squeezed vacuum."""
    if not w > 0 or not n_lo > 0:
        raise ValueError("beam width and LO photon number must be positive")
    _check_nonneg(delta=delta, n_t=n_t)
    return (2.0 * delta / w) ** 2 * n_t * (n_t / n_lo)


def snr_split_heterodyne(
    delta_theta: float,
    d_aperture: float,
    wavelength: float,
    n_t: float,
    n_lo: float,
    r: float,
    phase: float,
    both_even: bool = False,
) -> float:
    """Split-detector heterodyne SNR for an angular target displacement.

    The default pairs an even target beam with a flipped LO.  With
    ``both_even`` both beams are even and the target's share of the noise
    doubles.  ``phase`` is ``theta_T - theta_LO + theta_H``.
    """
    if not d_aperture > 0 or not wavelength > 0:
        raise ValueError("aperture and wavelength must be positive")
    return split_heterodyne_spatial(
        d_aperture * delta_theta / wavelength, n_t, n_lo, r, phase, both_even
    )


def split_heterodyne_spatial(
    delta_over_w: float, n_t: float, n_lo: float, r: float, phase: float, both_even: bool = False
) -> float:
    """:func:`snr_split_heterodyne` in terms of the spatial ratio ``delta / W``."""
    _check_nonneg(n_t=n_t)
    share = 1.0 if both_even else 0.5
    return 2.0 * delta_over_w**2 * _bracket(n_t, n_lo, r, share) * n_t * math.cos(phase) ** 2


# ---------------------------------------------------------------------------
# phase change and balanced detection


def snr_phase_change(delta_theta_t: float, n_t: float, n_lo: float, r: float, phase: float) -> float:
    """Heterodyne detection of a small target phase change ``delta_theta_t``."""
    _check_nonneg(n_t=n_t)
    return 2.0 * delta_theta_t**2 * _bracket(n_t, n_lo, r, 0.5) * n_t * math.sin(phase) ** 2


def snr_balanced(kind: str, n_t: float, n_lo: float, r: float, phase: float) -> float:
    """Balanced heterodyne (prefactor 2) or homodyne (prefactor 4) detection."""
    prefactor = {"heterodyne": 2.0, "homodyne": 4.0}.get(kind)
    if prefactor is None:
        raise ValueError(f"kind must be 'heterodyne' or 'homodyne', got {kind!r}")
    _check_nonneg(n_t=n_t)
    return prefactor * _lo_factor(n_lo, r) * n_t * math.sin(phase) ** 2


# ---------------------------------------------------------------------------
# direct detection of a squeezed target beam


def _check_direct(n_t: float, r: float):
    _check_nonneg(n_t=n_t, r=r)
    if _sinh2(r) > n_t + _DOMAIN_TOL * max(1.0, n_t):
        raise ValueError(f"sinh^2(r) = {_sinh2(r):.6g} exceeds the beam photon number {n_t:.6g}")


def snr_direct(n_t: float, r: float, theta_sq: float | None = None, theta_t: float = 0.0) -> float:
    """Direct detection, noise taken with the signal present.

    ``theta_sq=None`` uses the optimal squeeze phase ``2 theta_t``;
    otherwise the general-phase number variance is used.
    """
    _check_direct(n_t, r)
    if theta_sq is None:
        var = optimal_number_variance(n_t, r)
    else:
        alpha = math.sqrt(max(n_t - _sinh2(r), 0.0)) * complex(math.cos(theta_t), math.sin(theta_t))
        var = number_variance(alpha, SqueezeParams(r, theta_sq))
    if var <= 0.0:
        return math.inf if n_t > 0 else 0.0
    return n_t**2 / var


def snr_direct_weak_squeezing(n_t: float, r: float) -> float:
    """``n_t e^{2r}``, the direct-detection SNR when ``sinh^2 r << n_t``."""
    _check_direct(n_t, r)
    return n_t * math.exp(2.0 * r)


def snr_direct_bound(n_t: float) -> float:
    """Upper envelope ``4 n_t^2`` of the direct-detection SNR."""
    _check_nonneg(n_t=n_t)
    return 4.0 * n_t**2


def snr_direct_lossy(n_in: float, r: float, eta: float) -> float:
    """Direct detection after a loss of ``1 - eta`` on the squeezed beam.

    ``eta n^2 / (eta var + (1 - eta) n)`` with ``n`` and ``var`` the
    photon-number mean and optimal-phase variance before the loss.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    _check_direct(n_in, r)
    var = optimal_number_variance(n_in, r)
    bottom = eta * var + (1.0 - eta) * n_in
    if bottom <= 0.0:
        return math.inf if eta * n_in > 0 else 0.0
    return eta * n_in**2 / bottom


def squeezing_improvement_bound(eta: float) -> float:
    """Largest factor by which squeezing can raise lossy direct-detection SNR: ``1 / (1 - eta)``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if eta == 1.0:
        return math.inf
    return 1.0 / (1.0 - eta)
