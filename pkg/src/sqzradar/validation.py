"""Scenario-to-closed-form dispatch and the cross-check suite behind ``validate``."""

from __future__ import annotations

import cmath
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional

from . import closed_forms as cf
from .errors import RadarError
from .gaussian import mean_photon, number_variance
from .scenarios import DetectionScenario, Kind, ScenarioParams, build
from .snr import TruncationWarning, equivalent_snr

_PHASE_MATCH = 1e-12


def _combined_phase(p: ScenarioParams, heterodyne: bool = True) -> float:
    phase = cmath.phase(p.beta_t) - cmath.phase(p.alpha_lo)
    if heterodyne:
        phase += p.theta_h or 0.0
    return phase


def _uses_optimal_phase(scenario: DetectionScenario) -> bool:
    given = scenario.params.theta_sq
    if given is None or not scenario.params.r:
        return True
    diff = (given - scenario.optimal_theta_sq()) % (2.0 * math.pi)
    return min(diff, 2.0 * math.pi - diff) < _PHASE_MATCH


def analytic_snr(scenario: DetectionScenario) -> Optional[float]:
    """Closed-form SNR for ``scenario``, or ``None`` when no closed form applies.

    Closed forms assume the optimal squeeze phase; with any other explicit
    ``theta_sq`` only the direct-detection kinds have an expression.
    """
    kind = scenario.kind
    p = scenario.params
    r = p.r or 0.0
    sq = scenario.squeeze

    if kind in (Kind.DIRECT_TARGET, Kind.DIRECT_TARGET_LOSSY):
        n = mean_photon(p.beta_t, sq)
        var = number_variance(p.beta_t, sq)
        eta = 1.0 if p.eta is None else p.eta
        bottom = eta * var + (1.0 - eta) * n
        if bottom <= 0.0:
            return math.inf if eta * n > 0 else 0.0
        return eta * n * n / bottom
    if kind is Kind.SPLIT_DIRECT_SINGLE:
        return cf.snr_split_direct(p.delta, p.width, mean_photon(p.beta_t, sq))

    if not _uses_optimal_phase(scenario):
        return None
    n_t = abs(p.beta_t) ** 2
    n_lo = mean_photon(p.alpha_lo, sq)

    if kind is Kind.HETERODYNE_TARGET:
        return cf.snr_heterodyne(n_t, n_lo, r, _combined_phase(p))
    if kind is Kind.HETERODYNE_TARGET_LOSSY:
        return cf.snr_heterodyne_lossy(n_t, n_lo, r, _combined_phase(p), p.eta)
    if kind is Kind.SPLIT_HOMODYNE_TWO_MODE:
        return cf.snr_split_homodyne_two_mode(p.delta, p.width, n_t, n_lo, r, _combined_phase(p, False))
    if kind in (Kind.SPLIT_HETERODYNE, Kind.SPLIT_HETERODYNE_BOTH_EVEN):
        return cf.split_heterodyne_spatial(
            p.delta / p.width, n_t, n_lo, r, _combined_phase(p), kind is Kind.SPLIT_HETERODYNE_BOTH_EVEN
        )
    if kind is Kind.PHASE_CHANGE:
        return cf.snr_phase_change(p.delta_theta_t, n_t, n_lo, r, _combined_phase(p))
    if kind is Kind.BALANCED_HETERODYNE:
        return cf.snr_balanced("heterodyne", n_t, n_lo, r, _combined_phase(p))
    if kind is Kind.BALANCED_HOMODYNE:
        return cf.snr_balanced("homodyne", n_t, n_lo, r, _combined_phase(p, False))
    raise AssertionError(f"unhandled kind {kind}")


# ---------------------------------------------------------------------------
# validation suite


@dataclass(frozen=True)
class ToleranceProfile:
    name: str
    default: float
    per_kind: dict = field(default_factory=dict)
    cutoff: Optional[int] = None

    def tolerance(self, kind: Kind) -> float:
        return self.per_kind.get(kind, self.default)


PROFILES = {
    "default": ToleranceProfile(
        "default",
        1e-6,
        {
            Kind.SPLIT_HETERODYNE: 1e-3,
            Kind.SPLIT_HETERODYNE_BOTH_EVEN: 1e-3,
            Kind.PHASE_CHANGE: 1e-2,
        },
    ),
    "strict": ToleranceProfile("strict", 1e-12, cutoff=12),
}


def _case(kind: Kind, **params) -> DetectionScenario:
    return DetectionScenario(kind, ScenarioParams(**params))


def validation_cases() -> list[DetectionScenario]:
    """Scenarios checked by ``validate``; each lies in its closed form's regime of validity."""
    K = Kind
    cases = []
    for a in (1.0, 2.0, 3.0):
        for b in (0.5, 1.0):
            for r in (0.0, 0.3, 0.8):
                for phase in (0.0, math.pi / 6, math.pi / 2):
                    cases.append(_case(K.HETERODYNE_TARGET, alpha_lo=a, beta_t=cmath.rect(b, phase), r=r))
    cases.append(_case(K.HETERODYNE_TARGET, alpha_lo=2.0, beta_t=1.0, r=0.4, theta_h=0.7))
    for eta in (0.25, 0.5, 0.9):
        cases.append(_case(K.HETERODYNE_TARGET_LOSSY, alpha_lo=2.0, beta_t=1.0, r=0.5, eta=eta))
    for a in (1.0, 2.0, 3.0):
        for r in (0.0, 0.4, 0.8):
            cases.append(_case(K.DIRECT_TARGET, beta_t=a, r=r))
    cases.append(_case(K.DIRECT_TARGET, beta_t=2.0, r=0.5, theta_sq=1.0))
    for eta in (0.3, 0.5, 0.8):
        cases.append(_case(K.DIRECT_TARGET_LOSSY, beta_t=2.0, r=0.8, eta=eta))
    for r in (0.0, 0.6):
        cases.append(_case(K.BALANCED_HETERODYNE, alpha_lo=3.0, beta_t=1j, r=r))
        cases.append(_case(K.BALANCED_HOMODYNE, alpha_lo=3.0, beta_t=1j, r=r))
    for r in (0.0, 0.5, 1.0):
        cases.append(_case(K.SPLIT_DIRECT_SINGLE, beta_t=2.0, r=r, delta=0.1, width=1.0))
    for phase in (math.pi / 2, 0.3):
        cases.append(
            _case(K.SPLIT_HOMODYNE_TWO_MODE, alpha_lo=2.0, beta_t=cmath.rect(1.0, phase), r=0.5, delta=0.05, width=1.0)
        )
    for delta in (0.01, 0.05):
        for r in (0.0, 0.5):
            cases.append(_case(K.SPLIT_HETERODYNE, alpha_lo=3.0, beta_t=1.0, r=r, delta=delta, width=1.0))
    # the both-even closed form is only reached when the target is weak next to the LO
    for r in (0.0, 0.5):
        cases.append(_case(K.SPLIT_HETERODYNE_BOTH_EVEN, alpha_lo=10.0, beta_t=0.1, r=r, delta=0.05, width=1.0))
    for r in (0.0, 0.5):
        cases.append(_case(K.PHASE_CHANGE, alpha_lo=3.0, beta_t=1j, r=r, delta_theta_t=1e-3))
    return cases


@dataclass
class KindSummary:
    kind: Kind
    tolerance: float
    cases: int = 0
    worst_rel_error: float = 0.0
    worst_leakage: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class ValidationSummary:
    profile: str
    kinds: dict
    seconds: float

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.kinds.values())

    def lines(self) -> list[str]:
        out = []
        for s in self.kinds.values():
            status = "PASS" if s.passed else "FAIL"
            out.append(
                f"{status} {s.kind.value}: {s.cases} cases, worst rel_error {s.worst_rel_error:.3g}"
                f" (tol {s.tolerance:.1g}), worst leakage {s.worst_leakage:.3g}"
            )
            out.extend(f"    {msg}" for msg in s.failures)
        out.append(f"{'PASS' if self.passed else 'FAIL'} overall ({self.seconds:.1f} s, profile {self.profile})")
        return out


def run_validate(profile: str | ToleranceProfile = "default") -> ValidationSummary:
    """Compare every validation case's Fock-space SNR with its closed form."""
    if not isinstance(profile, ToleranceProfile):
        if profile not in PROFILES:
            raise ValueError(f"unknown tolerance profile {profile!r}; choose from {', '.join(PROFILES)}")
        profile = PROFILES[profile]
    start = time.perf_counter()
    kinds: dict[Kind, KindSummary] = {}
    for scenario in validation_cases():
        if profile.cutoff is not None:
            scenario = DetectionScenario(scenario.kind, scenario.params, profile.cutoff)
        tol = profile.tolerance(scenario.kind)
        summary = kinds.setdefault(scenario.kind, KindSummary(scenario.kind, tol))
        summary.cases += 1
        label = ", ".join(f"{k}={v}" for k, v in scenario.params.given().items())
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                report = equivalent_snr(build(scenario), analytic_snr(scenario))
        except RadarError as exc:
            summary.failures.append(f"{label}: {exc}")
            continue
        summary.worst_leakage = max(summary.worst_leakage, report.leakage)
        if report.rel_error is None:
            summary.failures.append(f"{label}: no closed form")
            continue
        summary.worst_rel_error = max(summary.worst_rel_error, report.rel_error)
        if report.rel_error > tol:
            summary.failures.append(
                f"{label}: rel_error {report.rel_error:.3g} > {tol:.1g} (leakage {report.leakage:.3g})"
            )
    return ValidationSummary(profile.name, kinds, time.perf_counter() - start)
