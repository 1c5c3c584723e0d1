from isofill.builders.complexes import grid_complex, grid_vertex, parse_preset, rips_complex, tree_complex
from isofill.builders.groups import PRESETS, Presentation, cayley_ball, free_reduce, invert, trace_word
from isofill.builders.metrics import (
    FiniteMetric,
    HyperbolicityEstimate,
    Truncation,
    estimate_delta,
    gromov_product,
)

__all__ = [
    "PRESETS",
    "FiniteMetric",
    "HyperbolicityEstimate",
    "Presentation",
    "Truncation",
    "cayley_ball",
    "estimate_delta",
    "free_reduce",
    "grid_complex",
    "grid_vertex",
    "gromov_product",
    "invert",
    "parse_preset",
    "rips_complex",
    "trace_word",
    "tree_complex",
]
