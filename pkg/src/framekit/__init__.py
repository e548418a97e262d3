"""Finite frames in C^d: duals, erasures, robustness, bridging and dilation."""

from .core import (
    DEFAULT_TOL,
    Frame,
    FrameBounds,
    ToleranceConfig,
    analysis,
    fixture,
    frame_bounds,
    frame_operator,
    gramian,
    random_frame,
    random_unitary,
    synthesis,
    validate_frame,
)
from .duals import (
    DualPair,
    DualPerturbation,
    canonical_dual,
    is_dual_pair,
    perturbed_dual,
    random_dual_perturbation,
)
from .mrc import ErasureSet, mrc_sweep, partial_reconstruction, satisfies_mrc
from .robustness import build_gamma, excess, is_m_erasure_robust, spark, verify_range_equals_nullspace
from .bridging import BridgePlan, find_bridge_set, recover, simulate_channel, solve_bridge
from .dilation import complement_witness, naimark_dilate, one_erasure_certificate
from .errors import FramekitError, InputError, NoBridge, NumericalError
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BridgePlan",
    "DEFAULT_TOL",
    "DualPair",
    "DualPerturbation",
    "ErasureSet",
    "Frame",
    "FrameBounds",
    "FramekitError",
    "InputError",
    "NoBridge",
    "NumericalError",
    "ToleranceConfig",
    "analysis",
    "build_gamma",
    "canonical_dual",
    "complement_witness",
    "excess",
    "find_bridge_set",
    "fixture",
    "frame_bounds",
    "frame_operator",
    "gramian",
    "is_dual_pair",
    "is_m_erasure_robust",
    "mrc_sweep",
    "naimark_dilate",
    "one_erasure_certificate",
    "partial_reconstruction",
    "perturbed_dual",
    "random_dual_perturbation",
    "random_frame",
    "random_unitary",
    "recover",
    "satisfies_mrc",
    "simulate_channel",
    "solve_bridge",
    "spark",
    "synthesis",
    "validate_frame",
    "verify_range_equals_nullspace",
]
