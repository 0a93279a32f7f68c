"""Topology-preserving, differentiable skeletonization of binary and probabilistic volumes."""

from .census import CensusResult, census_report, run_census
from .detectors import boolean_simple_mask, endpoint_mask, euler_delta_mask, neighbor_count_26
from .diff import NoiseParams, StochasticSample, learn_skeleton_demo, sample_relaxed, skeletonize_diff
from .estimators import MorphologicalSkeletonizer, Skeletonizer, StochasticSkeletonizer
from .exceptions import ContractError, DomainError, FormatError
from .io import read_volume, write_volume
from .kernels import KernelBank, kernel_bank
from .peeler import PeelConfig, morphological_skeleton_baseline, peel_subiteration, skeletonize
from .shapes import make_shape
from .tape import GradientTape, backward
from .topology import (
    ComplexCounts,
    TopologyReport,
    betti_numbers,
    complex_counts,
    euler_characteristic,
    is_endpoint,
    is_simple_exact,
    label_components,
)
from .volume import (
    SUBFIELDS,
    BinaryVolume,
    ProbabilityVolume,
    config_to_patch,
    neighbors,
    pad_background,
    patch_to_config,
    subfield_mask,
)

__version__ = "0.1.0"

__all__ = [
    "SUBFIELDS",
    "BinaryVolume",
    "CensusResult",
    "ComplexCounts",
    "ContractError",
    "DomainError",
    "FormatError",
    "GradientTape",
    "KernelBank",
    "MorphologicalSkeletonizer",
    "NoiseParams",
    "PeelConfig",
    "ProbabilityVolume",
    "Skeletonizer",
    "StochasticSample",
    "StochasticSkeletonizer",
    "TopologyReport",
    "backward",
    "betti_numbers",
    "boolean_simple_mask",
    "census_report",
    "complex_counts",
    "config_to_patch",
    "endpoint_mask",
    "euler_characteristic",
    "euler_delta_mask",
    "is_endpoint",
    "is_simple_exact",
    "kernel_bank",
    "label_components",
    "learn_skeleton_demo",
    "make_shape",
    "morphological_skeleton_baseline",
    "neighbor_count_26",
    "neighbors",
    "pad_background",
    "patch_to_config",
    "peel_subiteration",
    "read_volume",
    "run_census",
    "sample_relaxed",
    "skeletonize",
    "skeletonize_diff",
    "subfield_mask",
    "write_volume",
]
