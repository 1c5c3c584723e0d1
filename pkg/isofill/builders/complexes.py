"""Rips complexes and the grid and tree presets."""
from fractions import Fraction
import logging
import re
import time
from typing import List, Optional, Set, Tuple

import networkx as nx
import numpy as np

from isofill.builders.groups import PRESETS, cayley_ball
from isofill.builders.metrics import FiniteMetric, Truncation
from isofill.chains import Complex
from isofill.errors import ConfigurationError, ContractError

logger = logging.getLogger("isofill.builders")


def rips_complex(m: FiniteMetric, d, max_dim: int, logger=logger) -> Complex:
    """Flag complex on the points of ``m`` with an edge whenever d(u, v) <= d."""
    if max_dim < 1:
        raise ContractError("max_dim must be >= 1")
    d = Fraction(d)
    if d <= 0:
        raise ContractError("the Rips scale must be positive")
    start = time.time()
    dist = m.scaled
    bound = d * m.scale
    upper: List[Set[int]] = [
        set((np.flatnonzero(dist[u, u + 1:] <= bound) + u + 1).tolist()) for u in range(m.size)
    ]
    simplices: List[Tuple[int, ...]] = []

    def extend(simplex: Tuple[int, ...], candidates: Set[int]):
        for w in sorted(candidates):
            grown = simplex + (w,)
            simplices.append(grown)
            if len(grown) <= max_dim:
                extend(grown, candidates & upper[w])

    for u in range(m.size):
        extend((u,), upper[u])

    metadata = {"builder": "rips", "rips_scale": str(d), "epsilon": str(m.epsilon)}
    if m.truncation is not None:
        metadata.update(
            radius=m.truncation.radius, center=m.truncation.center, convex=m.truncation.convex
        )
    complex = Complex(m.size, simplices, metric=m, metadata=metadata)
    logger.info(f"Rips complex P_{d} up to dimension {max_dim}: {complex!r}, took {time.time() - start:.2f} seconds")
    return complex


def grid_vertex(w: int, x: int, y: int) -> int:
    return y * (w + 1) + x


def grid_complex(w: int, h: int) -> Tuple[Complex, FiniteMetric]:
    """(w+1)×(h+1) vertices; each unit square is cut along its (x,y)-(x+1,y+1) diagonal."""
    if w < 1 or h < 1:
        raise ContractError("grid sides must be >= 1")
    triangles = []
    for y in range(h):
        for x in range(w):
            a, b = grid_vertex(w, x, y), grid_vertex(w, x + 1, y)
            c, e = grid_vertex(w, x, y + 1), grid_vertex(w, x + 1, y + 1)
            triangles += [(a, b, e), (a, c, e)]
    n = (w + 1) * (h + 1)
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for t in triangles:
        graph.add_edges_from([(t[0], t[1]), (t[1], t[2]), (t[0], t[2])])
    metric = FiniteMetric.from_graph(graph, epsilon=1)
    metadata = {"builder": "grid", "grid": [w, h], "epsilon": 1}
    return Complex(n, triangles, metric=metric, metadata=metadata), metric


def tree_complex(valence: int, depth: int) -> Tuple[Complex, FiniteMetric]:
    """Ball of radius ``depth`` in the ``valence``-regular tree."""
    if valence < 1 or depth < 0:
        raise ContractError("tree needs valence >= 1 and depth >= 0")
    edges = []
    frontier, n = [0], 1
    for level in range(depth):
        grown = []
        for parent in frontier:
            for _ in range(valence if parent == 0 else valence - 1):
                edges.append((parent, n))
                grown.append(n)
                n += 1
        frontier = grown
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(edges)
    metric = FiniteMetric.from_graph(graph, epsilon=1, truncation=Truncation(0, depth, True))
    metadata = {"builder": "tree", "radius": depth, "center": 0, "convex": True, "epsilon": 1}
    return Complex(n, edges, metric=metric, metadata=metadata), metric


def parse_preset(name: str, radius: Optional[int] = None) -> Tuple[Complex, FiniteMetric]:
    """Build ``grid:WxH``, ``tree:valence,depth`` or a named group ball of ``radius``."""
    name = name.strip()
    grid = re.fullmatch(r"grid:(\d+)x(\d+)", name)
    if grid:
        return grid_complex(int(grid.group(1)), int(grid.group(2)))
    tree = re.fullmatch(r"tree:(\d+),(\d+)", name)
    if tree:
        return tree_complex(int(tree.group(1)), int(tree.group(2)))
    if name in PRESETS:
        if radius is None:
            raise ConfigurationError(f"preset {name!r} needs a radius")
        return cayley_ball(PRESETS[name][0], radius)
    raise ConfigurationError(
        f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}, grid:WxH or tree:valence,depth"
    )
