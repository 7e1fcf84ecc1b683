"""Submodular minimization over complements of k-hierarchical lattices."""

__version__ = "0.1.0"

from hiersfm.core import GroundSet, SubmodularOracle, enumerate_st_pairs, enumerate_subsets
from hiersfm.families import ConstraintFamily, ExplicitFamily, RingFamily
from hiersfm.sfm import NumericalStall, OverflowRisk, min_norm_sfm, min_over_box
from hiersfm.solver import (
    ExhaustedValues,
    SolveReport,
    kth_smallest,
    minimize_over_crossing_complement,
    minimize_over_hierarchical_complement,
    minimize_over_intersecting_complement,
)

__all__ = [
    "ConstraintFamily",
    "ExhaustedValues",
    "ExplicitFamily",
    "GroundSet",
    "NumericalStall",
    "OverflowRisk",
    "RingFamily",
    "SolveReport",
    "SubmodularOracle",
    "enumerate_st_pairs",
    "enumerate_subsets",
    "kth_smallest",
    "min_norm_sfm",
    "min_over_box",
    "minimize_over_crossing_complement",
    "minimize_over_hierarchical_complement",
    "minimize_over_intersecting_complement",
]
