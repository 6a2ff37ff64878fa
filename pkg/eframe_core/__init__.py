"""eframe_core: finite-dimensional E-frames, their bounds, and theorem verifiers."""
from .errors import EFrameError
from .frames import EFrameSystem, optimal_frame_bounds
from .hilbert import MatrixMap, VectorSequence
from .models import ExperimentConfig, FrameBounds, Tolerances, VerifierReport

__all__ = [
    "EFrameError",
    "EFrameSystem",
    "ExperimentConfig",
    "FrameBounds",
    "MatrixMap",
    "Tolerances",
    "VectorSequence",
    "VerifierReport",
    "optimal_frame_bounds",
]
