"""Matrix-valued Riesz bases and frames in L^2(G, C^{s x r}) for finite abelian G."""

from .group import GroupElement, GroupSpec, character, character_table, scalar_onb
from .space import MatFn, SpaceSpec, frob_norm, mat_inner, trace_inner
from .operators import LinOp
from .riesz import MatONB, RieszBasis, canonical_onb
from .frames import FrameReport, frame_report, optimal_frame_bounds, verify_riesz

__version__ = "0.1.0"

__all__ = [
    "GroupElement", "GroupSpec", "character", "character_table", "scalar_onb",
    "MatFn", "SpaceSpec", "frob_norm", "mat_inner", "trace_inner", "LinOp",
    "MatONB", "RieszBasis", "canonical_onb",
    "FrameReport", "frame_report", "optimal_frame_bounds", "verify_riesz",
]
