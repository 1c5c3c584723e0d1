from isofill.profiler.axioms import (
    Rectangle,
    RectangleReport,
    ThetaReport,
    check_rectangle,
    check_theta,
    rectangle_constant,
    rectangle_loops,
    sample_theta_triples,
)
from isofill.profiler.coning import ConingReport, RadiusReport, check_coning, path_constant
from isofill.profiler.profile import (
    GrowthClass,
    IsoProfile,
    ProfileEntry,
    SubEuclideanReport,
    check_subeuclidean,
    classify_growth,
    compare_growth,
    complex_fingerprint,
    equivalent,
    fill_cycles,
    profile,
    profile_loops,
    sequential_filler,
    worst_status,
)
from isofill.profiler.sampling import enumerate_cycles, patch_cycles, random_walk_cycles

__all__ = [
    "ConingReport",
    "GrowthClass",
    "IsoProfile",
    "ProfileEntry",
    "RadiusReport",
    "Rectangle",
    "RectangleReport",
    "SubEuclideanReport",
    "ThetaReport",
    "check_coning",
    "check_rectangle",
    "check_subeuclidean",
    "check_theta",
    "classify_growth",
    "compare_growth",
    "complex_fingerprint",
    "enumerate_cycles",
    "equivalent",
    "fill_cycles",
    "patch_cycles",
    "path_constant",
    "profile",
    "profile_loops",
    "random_walk_cycles",
    "rectangle_constant",
    "rectangle_loops",
    "sample_theta_triples",
    "sequential_filler",
    "worst_status",
]
