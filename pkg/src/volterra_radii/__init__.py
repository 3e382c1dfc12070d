"""Stability analysis for linear convolution difference systems with
infinite delay: UE-stability verdicts, operator-norm bounds, stability
radii, destabilizer synthesis and small-gain certificates.
"""

from ._backend import backend_name
from .config import DEFAULT_CONFIG, AnalysisConfig
from .errors import (
    BaseUnstableError,
    BoundaryZeroError,
    CertificationError,
    DimensionError,
    DivergentWeightError,
    DomainError,
    InsufficientDataError,
    ModeError,
    NonDecayingStructureError,
    SchemaError,
    SingularError,
    SpaceNotSupportedError,
    VolterraError,
)
from .kernel import ConvolutionKernel, PhaseSpace, Prehistory, add_kernels, phase_norm
from .operators import (
    NormBounds,
    PerturbationStructure,
    apply_input_state,
    gamma_norm,
    io_coefficients,
    io_norm,
)
from .radii import (
    RadiusReport,
    radius_delayed_feedback,
    radius_structured,
    radius_unstructured,
    synthesize_destabilizer,
    transfer_max_on_circle,
    transfer_profile,
)
from .spectral import (
    DecayEstimate,
    StabilityVerdict,
    circle_min_singular,
    decay_fit,
    resolvent_sequence,
    transfer_resolvent,
    ue_verdict,
    winding_number_det,
)
from .tvcert import (
    Certificate,
    DisturbanceSpec,
    base_zero_test,
    simulate,
    smallgain_certify,
    weighted_row_norm,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "BaseUnstableError",
    "BoundaryZeroError",
    "Certificate",
    "CertificationError",
    "ConvolutionKernel",
    "DEFAULT_CONFIG",
    "DecayEstimate",
    "DimensionError",
    "DisturbanceSpec",
    "DivergentWeightError",
    "DomainError",
    "InsufficientDataError",
    "ModeError",
    "NonDecayingStructureError",
    "NormBounds",
    "PerturbationStructure",
    "PhaseSpace",
    "Prehistory",
    "RadiusReport",
    "SchemaError",
    "SingularError",
    "SpaceNotSupportedError",
    "StabilityVerdict",
    "VolterraError",
    "add_kernels",
    "apply_input_state",
    "backend_name",
    "base_zero_test",
    "circle_min_singular",
    "decay_fit",
    "gamma_norm",
    "io_coefficients",
    "io_norm",
    "phase_norm",
    "radius_delayed_feedback",
    "radius_structured",
    "radius_unstructured",
    "resolvent_sequence",
    "simulate",
    "smallgain_certify",
    "synthesize_destabilizer",
    "transfer_max_on_circle",
    "transfer_profile",
    "transfer_resolvent",
    "ue_verdict",
    "weighted_row_norm",
    "winding_number_det",
]
