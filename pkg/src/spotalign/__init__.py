"""spotalign: rectify and align roadside parking-spot GPS points."""

from .geo import GeoPoint, LocalFrame, LocalPoint, make_frame, to_geo, to_local
from .rigid import RigidTransform2D, StackedCoords, TransformIncrement, compose, invert, jacobian, warp
from .roads import CandidateSet, EmptyCandidateError, RoadSegment, SpotType, sample_candidates, segment_arclength
from .solver import (
    DegenerateGeometryError,
    NumericalFailureError,
    SolverConfig,
    SolverResult,
    SolverState,
    admm_solve,
    alignment_loss,
    rank1_excess_prox,
    svt_prox,
)
from .matchers import Assignment, baseline_rectify, cd_distance, ed_match, hungarian_assign, wd_match
from .pipeline import (
    CollectedSet,
    InsufficientCandidatesError,
    Mixed,
    NoiseSpec,
    RandomNoise,
    RectifiedSet,
    Rotational,
    Translational,
    inject_noise,
    raa_rectify,
    rectify,
    synth_corpus,
)
from .metrics import EvalReport, acd, ar, evaluate_segments, robustness_index
from .dataio import Dataset, DatasetError, RunConfig, load_dataset, save_dataset

__all__ = [
    "GeoPoint", "LocalFrame", "LocalPoint", "make_frame", "to_geo", "to_local",
    "RigidTransform2D", "StackedCoords", "TransformIncrement", "compose", "invert", "jacobian", "warp",
    "CandidateSet", "EmptyCandidateError", "RoadSegment", "SpotType",
    "sample_candidates", "segment_arclength",
    "DegenerateGeometryError", "NumericalFailureError",
    "SolverConfig", "SolverResult", "SolverState", "admm_solve", "alignment_loss",
    "rank1_excess_prox", "svt_prox",
    "Assignment", "baseline_rectify", "cd_distance", "ed_match", "hungarian_assign", "wd_match",
    "CollectedSet", "InsufficientCandidatesError", "Mixed", "NoiseSpec", "RandomNoise",
    "RectifiedSet", "Rotational", "Translational",
    "inject_noise", "raa_rectify", "rectify", "synth_corpus",
    "EvalReport", "acd", "ar", "evaluate_segments", "robustness_index",
    "Dataset", "DatasetError", "RunConfig", "load_dataset", "save_dataset",
]

__version__ = "0.1.0"
