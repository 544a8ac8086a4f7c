"""Signal-to-noise ratios of squeezed-light laser-radar receivers.

Detection scenarios are simulated in a truncated Fock space and compared
with closed-form expressions; see :mod:`sqzradar.scenarios`,
:mod:`sqzradar.snr` and :mod:`sqzradar.closed_forms`.
"""

from .errors import (
    DimensionCapError,
    NonHermitianError,
    NonUnitaryError,
    RadarError,
    RegisterMismatchError,
    ScenarioError,
    TruncationError,
    UnknownModeError,
)
from .fock import FrequencyTag, LinearOperator, ModeLabel, ModeRegister, PortTag, StateVector
from .gaussian import CoherentParams, SqueezeParams, choose_cutoff, displaced_squeezed_state
from .geometry import BeamSplitterSpec, Shape, TransverseMode, loss_channel, signed_overlap
from .scenarios import DetectionScenario, Hypothesis, HypothesisPair, Kind, ScenarioParams, build
from .snr import RocPoint, SnrReport, equivalent_snr, min_detectable_angle, roc_point
from .validation import analytic_snr, run_validate

__version__ = "0.1.0"
