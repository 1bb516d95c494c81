"""Exact characteristic-class computations and homeomorphism obstructions for complex manifolds."""
from .catalog import ManifoldRecord, build_builtin, load_record
from .chern import ManifoldModel, chern_numbers, complete_intersection, pontrjagin_numbers
from .deduce import DeductionTrace, bb_decompositions, replay, run_pipeline
from .exact import ChernlabError, GradedClass

__all__ = [
    "ChernlabError", "DeductionTrace", "GradedClass", "ManifoldModel", "ManifoldRecord",
    "bb_decompositions", "build_builtin", "chern_numbers", "complete_intersection",
    "load_record", "pontrjagin_numbers", "replay", "run_pipeline",
]
