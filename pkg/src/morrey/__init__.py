"""Executable checks for quasiconvexity and weak/strong Morrey quasiconvexity
of ess-sup functionals, with an exact reproduction of the R^4 square-boundary
counterexample (weak but not strong Morrey quasiconvex)."""

__version__ = "0.1.0"

from .checkers import (
    ReproduceConfig,
    SearchConfig,
    SuiteConfig,
    falsify_strong_mqc,
    falsify_weak_mqc,
    reproduce_counterexample,
    reproduce_paper_counterexample,
    scalar_equivalence_suite,
    validate_witness,
)
from .constructions import LaminateSpec, ZigZagProfile, laminate_test_map, zigzag, zigzag_test_map
from .density import (
    Density,
    GradientPoint,
    IndicatorDensity,
    SampleBudget,
    SegmentUnionSet,
    eval_density,
    make_segment_indicator_2d,
    make_square_boundary_4d,
    segment_distance,
    sublevel_midpoint_convexity,
)
from .functionals import EssSupResult, ess_sup_shifted, weak_mqc_inequality_holds
from .mesh import CubeMesh, PwAffineMap, boundary_sup, build_kuhn_mesh, grad_sup_norm, interpolate, simplex_gradient
from .records import Verdict, Witness

__all__ = [
    "CubeMesh", "Density", "EssSupResult", "GradientPoint", "IndicatorDensity", "LaminateSpec",
    "PwAffineMap", "ReproduceConfig", "SampleBudget", "SearchConfig", "SegmentUnionSet", "SuiteConfig",
    "Verdict", "Witness", "ZigZagProfile", "boundary_sup", "build_kuhn_mesh", "ess_sup_shifted",
    "eval_density", "falsify_strong_mqc", "falsify_weak_mqc", "grad_sup_norm", "interpolate",
    "laminate_test_map", "make_segment_indicator_2d", "make_square_boundary_4d",
    "reproduce_counterexample", "reproduce_paper_counterexample", "scalar_equivalence_suite", "segment_distance",
    "simplex_gradient", "sublevel_midpoint_convexity", "validate_witness", "weak_mqc_inequality_holds",
    "zigzag", "zigzag_test_map",
]
