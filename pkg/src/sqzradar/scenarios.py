"""Hypothesis-state pairs and signal operators for each detection scenario.

Conventions
-----------
* Heterodyne-type operators carry coefficient 1 per matched pair and
  time-averaged (homodyne / direct) operators carry 2, i.e. the field
  prefactor ``kappa hbar omega / (4 eps0 V)`` is the unit.  D^2 does not
  depend on this choice.
* Frequencies are symbolic: every tag sits at an integer multiple of the
  heterodyne frequency relative to the LO (IMAGE -1, LO 0, T +1, AUX +2),
  and a pair couples when the offsets differ by exactly one.  Homodyne
  scenarios put every tag at offset 0.
* A register holds the modes that are occupied under either hypothesis
  plus every vacuum mode coupled by the signal operator to a mode occupied
  under the variance hypothesis.  No other mode can change either mean or
  variance.
* Split-detector scenarios describe the beam in a frame that moves with
  it, so the same physical statistic has one matrix in the displaced frame
  (``signal_op``) and another in the undisplaced null frame
  (``signal_op_h0``).  Transverse structure only enters through the scalar
  overlap coefficients.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Callable, Optional

from .errors import ScenarioError
from .fock import (
    FrequencyTag,
    LinearOperator,
    ModeLabel,
    ModeRegister,
    PortTag,
    StateVector,
    expectation,
    hop,
    operator_sum,
)
from .gaussian import SqueezeParams, choose_cutoff, fock_amplitudes
from .geometry import Shape, TransverseMode, loss_channel, signed_overlap

PARTNER_CUTOFF = 3
CUTOFF_TOL = 1e-12

F = FrequencyTag
HETERODYNE_OFFSETS = {F.IMAGE: -1, F.LO: 0, F.T: 1, F.AUX: 2}
HOMODYNE_OFFSETS = {F.IMAGE: 0, F.LO: 0, F.T: 0, F.AUX: 0}


class Kind(str, Enum):
    HETERODYNE_TARGET = "HeterodyneTarget"
    HETERODYNE_TARGET_LOSSY = "HeterodyneTargetLossy"
    DIRECT_TARGET = "DirectTarget"
    DIRECT_TARGET_LOSSY = "DirectTargetLossy"
    SPLIT_DIRECT_SINGLE = "SplitDirectSingle"
    SPLIT_HOMODYNE_TWO_MODE = "SplitHomodyneTwoMode"
    SPLIT_HETERODYNE = "SplitHeterodyne"
    SPLIT_HETERODYNE_BOTH_EVEN = "SplitHeterodyneBothEven"
    PHASE_CHANGE = "PhaseChange"
    BALANCED_HETERODYNE = "BalancedHeterodyne"
    BALANCED_HOMODYNE = "BalancedHomodyne"


class Hypothesis(str, Enum):
    H0 = "H0"
    H1 = "H1"


_OPTIONAL = {"r": 0.0, "theta_sq": None}
_HET = {**_OPTIONAL, "theta_h": 0.0}

# (required, optional-with-default) parameters per kind
KIND_PARAMS: dict[Kind, tuple[tuple[str, ...], dict]] = {
    Kind.HETERODYNE_TARGET: (("alpha_lo", "beta_t"), _HET),
    Kind.HETERODYNE_TARGET_LOSSY: (("alpha_lo", "beta_t", "eta"), _HET),
    Kind.DIRECT_TARGET: (("beta_t",), _OPTIONAL),
    Kind.DIRECT_TARGET_LOSSY: (("beta_t", "eta"), _OPTIONAL),
    Kind.SPLIT_DIRECT_SINGLE: (("beta_t", "delta", "width"), _OPTIONAL),
    Kind.SPLIT_HOMODYNE_TWO_MODE: (("alpha_lo", "beta_t", "delta", "width"), _OPTIONAL),
    Kind.SPLIT_HETERODYNE: (("alpha_lo", "beta_t", "delta", "width"), _HET),
    Kind.SPLIT_HETERODYNE_BOTH_EVEN: (("alpha_lo", "beta_t", "delta", "width"), _HET),
    Kind.PHASE_CHANGE: (("alpha_lo", "beta_t", "delta_theta_t"), _HET),
    Kind.BALANCED_HETERODYNE: (("alpha_lo", "beta_t"), _HET),
    Kind.BALANCED_HOMODYNE: (("alpha_lo", "beta_t"), _OPTIONAL),
}

COMPLEX_PARAMS = ("alpha_lo", "beta_t")


@dataclass(frozen=True)
class ScenarioParams:
    """Physical inputs; unset fields are ``None``.

    ``alpha_lo`` is the LO displacement, ``beta_t`` the target-return
    displacement (for the direct-detection kinds it is the displacement of
    the squeezed target beam).  ``theta_sq = None`` selects the squeeze
    phase that minimises the noise for the scenario.
    """

    alpha_lo: Optional[complex] = None
    beta_t: Optional[complex] = None
    r: Optional[float] = None
    theta_sq: Optional[float] = None
    theta_h: Optional[float] = None
    delta: Optional[float] = None
    width: Optional[float] = None
    eta: Optional[float] = None
    delta_theta_t: Optional[float] = None

    def given(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}


PARAM_NAMES = tuple(f.name for f in fields(ScenarioParams))


@dataclass(frozen=True)
class DetectionScenario:
    kind: Kind
    params: ScenarioParams = field(default_factory=ScenarioParams)
    cutoff: Optional[int] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", Kind(self.kind))
        except ValueError:
            raise ScenarioError(f"unknown scenario kind {self.kind!r}") from None
        required, optional = KIND_PARAMS[self.kind]
        given = self.params.given()
        missing = [name for name in required if name not in given]
        if missing:
            raise ScenarioError(f"{self.kind.value} requires {', '.join(missing)}")
        extra = [name for name in given if name not in required and name not in optional]
        if extra:
            raise ScenarioError(f"{self.kind.value} does not use {', '.join(extra)}")
        p = replace(self.params, **{k: v for k, v in optional.items() if k not in given})
        for name in COMPLEX_PARAMS:
            if getattr(p, name) is not None:
                p = replace(p, **{name: complex(getattr(p, name))})
        object.__setattr__(self, "params", p)
        if p.r is not None and p.r < 0:
            raise ScenarioError(f"squeeze magnitude must be nonnegative, got {p.r}")
        if p.eta is not None and not 0.0 <= p.eta <= 1.0:
            raise ScenarioError(f"efficiency eta must lie in [0, 1], got {p.eta}")
        if p.width is not None and not p.width > 0:
            raise ScenarioError(f"beam width must be positive, got {p.width}")
        if p.delta is not None and not 0.0 <= p.delta <= p.width / 2 * (1 + 1e-12):
            raise ScenarioError(f"displacement delta must lie in [0, W/2], got {p.delta}")
        if self.cutoff is not None and self.cutoff < 2:
            raise ScenarioError("cutoff must be at least 2")

    def with_params(self, **changes) -> "DetectionScenario":
        return DetectionScenario(self.kind, replace(self.params, **changes), self.cutoff)

    @property
    def squeezed_mode(self) -> str:
        """Which beam carries the squeezing: ``"T"`` or ``"LO"``."""
        if self.kind in (Kind.DIRECT_TARGET, Kind.DIRECT_TARGET_LOSSY, Kind.SPLIT_DIRECT_SINGLE):
            return "T"
        return "LO"

    def optimal_theta_sq(self) -> float:
        """Squeeze phase minimising the noise of the variance hypothesis."""
        p = self.params
        theta_t = cmath.phase(p.beta_t) if p.beta_t is not None else 0.0
        theta_h = p.theta_h or 0.0
        if self.kind in (
            Kind.DIRECT_TARGET,
            Kind.DIRECT_TARGET_LOSSY,
            Kind.SPLIT_DIRECT_SINGLE,
            Kind.SPLIT_HOMODYNE_TWO_MODE,
        ):
            return 2.0 * theta_t
        if self.kind in (Kind.SPLIT_HETERODYNE, Kind.SPLIT_HETERODYNE_BOTH_EVEN):
            return 2.0 * (theta_t + theta_h)
        if self.kind is Kind.PHASE_CHANGE:
            # variance is taken in the shifted state
            return 2.0 * (theta_t + p.delta_theta_t + theta_h)
        return 0.0

    @property
    def theta_sq(self) -> float:
        return self.optimal_theta_sq() if self.params.theta_sq is None else self.params.theta_sq

    @property
    def squeeze(self) -> SqueezeParams:
        return SqueezeParams(self.params.r or 0.0, self.theta_sq)

    @property
    def variance_hypothesis(self) -> Hypothesis:
        if self.kind in (Kind.DIRECT_TARGET, Kind.DIRECT_TARGET_LOSSY, Kind.PHASE_CHANGE):
            return Hypothesis.H1
        return Hypothesis.H0


@dataclass(frozen=True, eq=False)
class HypothesisPair:
    psi0: StateVector
    psi1: StateVector
    signal_op: LinearOperator
    variance_hypothesis: Hypothesis
    signal_op_h0: Optional[LinearOperator] = None
    scenario: Optional[DetectionScenario] = None

    def __post_init__(self):
        reg = self.signal_op.register
        if self.psi0.register != reg or self.psi1.register != reg:
            raise ScenarioError("hypothesis states and signal operator use different registers")
        if self.signal_op_h0 is not None and self.signal_op_h0.register != reg:
            raise ScenarioError("null-frame operator uses a different register")

    @property
    def register(self) -> ModeRegister:
        return self.signal_op.register

    def operator(self, hypothesis: Hypothesis) -> LinearOperator:
        if hypothesis is Hypothesis.H0 and self.signal_op_h0 is not None:
            return self.signal_op_h0
        return self.signal_op

    def state(self, hypothesis: Hypothesis) -> StateVector:
        return self.psi0 if hypothesis is Hypothesis.H0 else self.psi1


def signal_mean(pair: HypothesisPair) -> tuple[float, float]:
    """``(<S>_0, <S>_1)``, each in its own frame."""
    return tuple(
        expectation(pair.state(h), pair.operator(h)).real for h in (Hypothesis.H0, Hypothesis.H1)
    )


# ---------------------------------------------------------------------------
# operator assembly


@dataclass
class _Layout:
    """Mode bookkeeping for one scenario before states are built."""

    occupied_h0: dict  # label -> (alpha, SqueezeParams | None)
    occupied_h1: dict
    candidates: list
    offsets: dict
    heterodyne: bool
    scale: float
    balanced: bool = False
    geometry_h0: Optional[dict] = None
    geometry_h1: Optional[dict] = None
    width: float = 1.0


def _coupling(layout: _Layout, geometry: Optional[dict], l: ModeLabel, k: ModeLabel, theta_h: float):
    """Coefficient of ``a_l^dag a_k`` in the signal operator (0 when not coupled)."""
    if PortTag.VAC in (l.port_tag, k.port_tag):
        return 0.0
    d = layout.offsets[l.frequency_tag] - layout.offsets[k.frequency_tag]
    if layout.heterodyne:
        if abs(d) != 1:
            return 0.0
        phase = cmath.exp(-1j * math.copysign(1.0, d) * theta_h)
    else:
        if d != 0:
            return 0.0
        phase = 1.0
    if layout.balanced:
        if l.port_tag == k.port_tag:
            return 0.0
        sign = -1j if l.port_tag is PortTag.LO_PORT else 1j
    else:
        sign = 1.0
    if geometry is None:
        weight = 1.0 if l.transverse_index == k.transverse_index else 0.0
    else:
        weight = signed_overlap(geometry[l], geometry[k]) / layout.width
    if weight == 0.0:
        return 0.0
    return layout.scale * sign * phase * weight


def _signal_operator(register: ModeRegister, layout: _Layout, geometry, theta_h) -> LinearOperator:
    terms = []
    for l in register.modes:
        for k in register.modes:
            c = _coupling(layout, geometry, l, k, theta_h)
            if c != 0.0:
                terms.append((c, hop(register, l, k)))
    return operator_sum(register, terms)


def _partners(layout: _Layout, occupied, theta_h) -> list:
    """Candidate vacuum modes coupled to any occupied mode in the variance frame."""
    geometry = layout.geometry_h0
    found = []
    for cand in layout.candidates:
        for occ in occupied:
            if _coupling(layout, geometry, cand, occ, theta_h) != 0.0:
                found.append(cand)
                break
    return found


def _cutoff_for(scenario: DetectionScenario, entries) -> int:
    if scenario.cutoff is not None:
        return scenario.cutoff
    return max(choose_cutoff(alpha, sq, CUTOFF_TOL) for alpha, sq in entries)


def _states(scenario: DetectionScenario, layout: _Layout, variance_h: Hypothesis):
    theta_h = scenario.params.theta_h or 0.0
    occupied = list(dict.fromkeys(list(layout.occupied_h1) + list(layout.occupied_h0)))
    noisy = layout.occupied_h0 if variance_h is Hypothesis.H0 else layout.occupied_h1
    partners = [m for m in _partners(layout, list(noisy), theta_h) if m not in occupied]
    cutoffs = []
    for mode in occupied:
        entries = [occ[mode] for occ in (layout.occupied_h0, layout.occupied_h1) if mode in occ]
        cutoffs.append(_cutoff_for(scenario, entries))
    register = ModeRegister(tuple(occupied + partners), tuple(cutoffs) + (PARTNER_CUTOFF,) * len(partners))
    psi = []
    for occ in (layout.occupied_h0, layout.occupied_h1):
        factors = {m: fock_amplitudes(a, s, register.cutoff(m)) for m, (a, s) in occ.items()}
        psi.append(StateVector.product(register, factors))
    return register, psi[0], psi[1]


def _layout(scenario: DetectionScenario) -> _Layout:
    p = scenario.params
    kind = scenario.kind
    sq = scenario.squeeze
    T, LO, IMG, AUX = (ModeLabel(t) for t in (F.T, F.LO, F.IMAGE, F.AUX))

    if kind in (Kind.HETERODYNE_TARGET, Kind.HETERODYNE_TARGET_LOSSY):
        return _Layout(
            occupied_h0={LO: (p.alpha_lo, sq)},
            occupied_h1={T: (p.beta_t, None), LO: (p.alpha_lo, sq)},
            candidates=[IMG, AUX],
            offsets=HETERODYNE_OFFSETS,
            heterodyne=True,
            scale=1.0,
        )
    if kind is Kind.PHASE_CHANGE:
        shifted = p.beta_t * cmath.exp(1j * p.delta_theta_t)
        return _Layout(
            occupied_h0={T: (p.beta_t, None), LO: (p.alpha_lo, sq)},
            occupied_h1={T: (shifted, None), LO: (p.alpha_lo, sq)},
            candidates=[IMG, AUX],
            offsets=HETERODYNE_OFFSETS,
            heterodyne=True,
            scale=1.0,
        )
    if kind in (Kind.DIRECT_TARGET, Kind.DIRECT_TARGET_LOSSY):
        return _Layout(
            occupied_h0={},
            occupied_h1={T: (p.beta_t, sq)},
            candidates=[],
            offsets=HOMODYNE_OFFSETS,
            heterodyne=False,
            scale=2.0,
        )
    if kind in (Kind.BALANCED_HETERODYNE, Kind.BALANCED_HOMODYNE):
        het = kind is Kind.BALANCED_HETERODYNE
        t_in = ModeLabel(F.T, 0, PortTag.T_PORT)
        lo_in = ModeLabel(F.LO, 0, PortTag.LO_PORT)
        if het:
            candidates = [
                ModeLabel(tag, 0, port)
                for port in (PortTag.T_PORT, PortTag.LO_PORT)
                for tag in (F.IMAGE, F.LO, F.T, F.AUX)
                if ModeLabel(tag, 0, port) not in (t_in, lo_in)
            ]
        else:
            candidates = []  # one frequency: the two input modes are the only ones
        return _Layout(
            occupied_h0={lo_in: (p.alpha_lo, sq)},
            occupied_h1={t_in: (p.beta_t, None), lo_in: (p.alpha_lo, sq)},
            candidates=candidates,
            offsets=HETERODYNE_OFFSETS if het else HOMODYNE_OFFSETS,
            heterodyne=het,
            scale=1.0 if het else 2.0,
            balanced=True,
        )
    return _split_layout(scenario)


def _split_layout(scenario: DetectionScenario) -> _Layout:
    p = scenario.params
    kind = scenario.kind
    sq = scenario.squeeze
    w = p.width

    def geo(label, moving):
        shape = Shape.EVEN if label.transverse_index == 0 else Shape.FLIPPED
        return TransverseMode(shape, p.delta if moving else 0.0, w)

    if kind is Kind.SPLIT_DIRECT_SINGLE:
        target = ModeLabel(F.T, 0)
        occupied = {target: (p.beta_t, sq)}
        candidates = [ModeLabel(F.T, 1)]
        offsets, het, scale = HOMODYNE_OFFSETS, False, 2.0
    elif kind is Kind.SPLIT_HOMODYNE_TWO_MODE:
        target = ModeLabel(F.T, 1)
        occupied = {ModeLabel(F.LO, 0): (p.alpha_lo, sq), target: (p.beta_t, None)}
        candidates = []  # u0 and u1 at the single frequency are both occupied
        offsets, het, scale = HOMODYNE_OFFSETS, False, 2.0
    else:
        target = ModeLabel(F.T, 0)
        lo_index = 1 if kind is Kind.SPLIT_HETERODYNE else 0
        occupied = {target: (p.beta_t, None), ModeLabel(F.LO, lo_index): (p.alpha_lo, sq)}
        candidates = [
            ModeLabel(tag, m) for tag in (F.T, F.LO, F.IMAGE, F.AUX) for m in (0, 1)
        ]
        candidates = [c for c in candidates if c not in occupied]
        offsets, het, scale = HETERODYNE_OFFSETS, True, 1.0

    labels = list(occupied) + candidates
    return _Layout(
        occupied_h0=dict(occupied),
        occupied_h1=dict(occupied),
        candidates=candidates,
        offsets=offsets,
        heterodyne=het,
        scale=scale,
        geometry_h0={m: geo(m, False) for m in labels},
        geometry_h1={m: geo(m, m == target) for m in labels},
        width=w,
    )


def build(scenario: DetectionScenario, image_band: bool = True) -> HypothesisPair:
    """Construct ``(psi0, psi1, S)`` for a scenario.

    ``image_band=False`` drops the image-band vacuum mode from heterodyne
    registers; it exists to expose that mode's share of the noise.
    """
    layout = _layout(scenario)
    if not image_band:
        layout.candidates = [
            c for c in layout.candidates if c.frequency_tag is not F.IMAGE
        ]
    variance_h = scenario.variance_hypothesis
    register, psi0, psi1 = _states(scenario, layout, variance_h)
    eta = scenario.params.eta
    if eta is not None:
        target = next(m for m in register.modes if m.frequency_tag is F.T)
        psi0 = loss_channel(psi0, target, eta)
        psi1 = loss_channel(psi1, target, eta)
        register = psi0.register
    theta_h = scenario.params.theta_h or 0.0
    op = _signal_operator(register, layout, layout.geometry_h1, theta_h)
    op_h0 = None
    if layout.geometry_h0 is not None:
        op_h0 = _signal_operator(register, layout, layout.geometry_h0, theta_h)
    return HypothesisPair(psi0, psi1, op, variance_h, op_h0, scenario)


def required_params(kind: Kind) -> tuple[tuple[str, ...], dict]:
    return KIND_PARAMS[Kind(kind)]
