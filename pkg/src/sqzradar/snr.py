"""Equivalent signal-to-noise ratio, ROC points and minimum-discernible angle.

Threshold tests use the Gaussian upper-tail function

    Q(x) = integral_x^inf exp(-t^2/2) dt / sqrt(2 pi) = erfc(x / sqrt(2)) / 2,

which detection-theory texts often write as ``erfc(x)``; the mathematical
``erfc`` is related by the formula above.  So ``Q0 = Q(x)`` and
``Qd = Q(x - sqrt(M D^2))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from scipy.stats import norm

from .errors import TruncationError
from .fock import expectation, variance
from .scenarios import Hypothesis, HypothesisPair

LEAKAGE_WARN = 1e-8
LEAKAGE_ERROR = 1e-6
REL_ERROR_FLOOR = 1e-30


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SnrReport:
    snr_numeric: float
    mean_h0: float
    mean_h1: float
    variance_used: float
    variance_hypothesis: Hypothesis
    leakage_h0: float
    leakage_h1: float
    norm_loss: float = 0.0
    snr_analytic: Optional[float] = None
    rel_error: Optional[float] = None
    diagnostic: str = ""

    @property
    def leakage(self) -> float:
        return max(self.leakage_h0, self.leakage_h1)


def relative_error(numeric: float, analytic: float) -> float:
    if math.isinf(numeric) or math.isinf(analytic):
        return 0.0 if numeric == analytic else math.inf
    return abs(numeric - analytic) / max(abs(analytic), REL_ERROR_FLOOR)


def equivalent_snr(
    pair: HypothesisPair,
    analytic: Optional[float] = None,
    leakage_warn: float = LEAKAGE_WARN,
    leakage_error: float = LEAKAGE_ERROR,
) -> SnrReport:
    """``D^2 = (<S>_1 - <S>_0)^2 / Var_h(S)`` with ``h`` fixed by the pair.

    Raises :class:`TruncationError` when either state leaks more than
    ``leakage_error``; warns above ``leakage_warn``.  Norm lost to the
    cutoff before the state was built counts as leakage too, since a cutoff
    far below the photon number leaves little weight anywhere near the top
    levels.  Zero variance with a
    nonzero mean separation yields ``inf`` and a diagnostic.
    """
    leak0 = pair.psi0.leakage()
    leak1 = pair.psi1.leakage()
    lost = max(0.0, 1.0 - pair.psi0.norm() ** 2, 1.0 - pair.psi1.norm() ** 2)
    worst = max(leak0, leak1, lost)
    if worst > leakage_error:
        raise TruncationError(
            f"truncation leakage {worst:.3g} (norm lost {lost:.3g}) exceeds {leakage_error:.1g}; raise the cutoff"
        )
    if worst > leakage_warn:
        warnings.warn(f"truncation leakage {worst:.3g} above {leakage_warn:.1g}", TruncationWarning, stacklevel=2)

    op0 = pair.operator(Hypothesis.H0)
    op1 = pair.operator(Hypothesis.H1)
    mean0 = expectation(pair.psi0, op0).real
    mean1 = expectation(pair.psi1, op1).real
    h = pair.variance_hypothesis
    var = variance(pair.state(h), pair.operator(h))
    diff2 = (mean1 - mean0) ** 2
    diagnostic = ""
    if var > 0.0:
        d2 = diff2 / var
    elif diff2 == 0.0:
        d2 = 0.0
    else:
        d2 = math.inf
        diagnostic = f"zero variance under {h.value} with mean separation {math.sqrt(diff2):.3g}"
    rel = None if analytic is None else relative_error(d2, analytic)
    return SnrReport(d2, mean0, mean1, var, h, leak0, leak1, lost, analytic, rel, diagnostic)


@dataclass(frozen=True)
class RocPoint:
    threshold_x: float
    m_intervals: int
    q0: float
    qd: float


def gaussian_tail(x: float) -> float:
    """Upper-tail probability of a standard normal (the detection-theory ``erfc``)."""
    return float(norm.sf(x))


def roc_point(d_squared: float, m: int, threshold_x: float) -> RocPoint:
    if d_squared < 0:
        raise ValueError("D^2 must be nonnegative")
    if m < 1:
        raise ValueError("number of observation intervals must be at least 1")
    q0 = gaussian_tail(threshold_x)
    qd = gaussian_tail(threshold_x - math.sqrt(d_squared * m))
    return RocPoint(threshold_x, m, q0, qd)


def min_detectable_angle(n_bar_t: float, wavelength: float, d_aperture: float) -> float:
    """Angular beam displacement whose split-detector SNR equals one."""
    if min(n_bar_t, wavelength, d_aperture) <= 0:
        raise ValueError("photon number, wavelength and aperture must be positive")
    return wavelength / (2.0 * math.sqrt(n_bar_t) * d_aperture)
