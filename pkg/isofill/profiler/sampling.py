"""Cycle families for profiles: exhaustive enumeration and seeded samplers."""
from itertools import product
import logging
from typing import Dict, Iterator, List, Optional, Sequence, Set

import networkx as nx
import numpy as np

from isofill.chains import Chain, Complex, boundary, l1_norm
from isofill.rings import NormedRing
from isofill.solver import path_chain

logger = logging.getLogger("isofill.profiler")


def _dedupe(chains) -> List[Chain]:
    seen = {}
    for z in chains:
        if not z.is_zero():
            seen.setdefault(z.key(), z)
    return [seen[k] for k in sorted(seen)]


def enumerate_cycles(
    complex: Complex, n: int, l_max: int, ring: NormedRing, coefficient_bound: int = 1
) -> List[Chain]:
    """Every nonzero n-cycle with |z| <= l_max, up to the enumeration's coefficient range.

    1-cycles are sums of directed simple cycles whose lengths add up to at
    most ``l_max``; every integer circulation decomposes this way. Higher
    cycles are signed sums over connected face-sharing sets of n-cells
    with unit coefficients.
    """
    if n == 1:
        chains = _one_cycles(complex, l_max, ring)
    else:
        chains = _unit_cycles(complex, n, l_max, ring)
    out = []
    for z in _dedupe(chains):
        if l1_norm(z) > l_max:
            continue
        if ring.is_discrete and ring.m is None and max(abs(v) for _, v in z.items()) > coefficient_bound:
            continue
        out.append(z)
    return out


def _one_cycles(complex: Complex, l_max: int, ring: NormedRing) -> Iterator[Chain]:
    graph = complex.skeleton_graph()
    simple = []
    for cycle in nx.simple_cycles(graph, length_bound=l_max):
        loop = list(cycle) + [cycle[0]]
        z = path_chain(complex, loop, ring)
        simple += [(len(cycle), z), (len(cycle), -z)]
    simple.sort(key=lambda item: (item[0], item[1].key()))

    def grow(start: int, total: int, acc: Optional[Chain]):
        for i in range(start, len(simple)):
            length, z = simple[i]
            if total + length > l_max:
                break
            combined = z if acc is None else acc + z
            yield combined
            yield from grow(i, total + length, combined)

    yield from grow(0, 0, None)


def connected_subsets(adjacency: Dict[int, Set[int]], max_size: int) -> Iterator[frozenset]:
    """Connected vertex subsets of size <= max_size, each exactly once (ESU enumeration)."""

    def extend(sub: Set[int], ext: Set[int], root: int, boundary_set: Set[int]):
        yield frozenset(sub)
        if len(sub) == max_size:
            return
        ext = set(ext)
        while ext:
            w = min(ext)
            ext.discard(w)
            exclusive = {u for u in adjacency[w] if u > root and u not in sub and u not in boundary_set}
            yield from extend(sub | {w}, ext | exclusive, root, boundary_set | adjacency[w])

    for v in sorted(adjacency):
        yield from extend({v}, {u for u in adjacency[v] if u > v}, v, set(adjacency[v]) | {v})


def _unit_cycles(complex: Complex, n: int, l_max: int, ring: NormedRing) -> Iterator[Chain]:
    faces_of = {cid: [f for f, _ in complex.incidences(n, cid)] for cid in range(complex.count(n))}
    sharing: Dict[int, Set[int]] = {cid: set() for cid in faces_of}
    by_face: Dict[int, List[int]] = {}
    for cid, fs in faces_of.items():
        for f in fs:
            by_face.setdefault(f, []).append(cid)
    for cells in by_face.values():
        for c in cells:
            sharing[c].update(x for x in cells if x != c)
    for subset in connected_subsets(sharing, l_max):
        cells = sorted(subset)
        counts: Dict[int, int] = {}
        for c in cells:
            for f in faces_of[c]:
                counts[f] = counts.get(f, 0) + 1
        if any(k < 2 for k in counts.values()):
            continue
        for signs in product((1, -1), repeat=len(cells) - 1):
            z = Chain(complex, n, ring, dict(zip(cells, (1,) + signs)))
            if boundary(z).is_zero():
                yield z
                yield -z


def random_walk_cycles(
    complex: Complex,
    count: int,
    lengths: Sequence[int],
    ring: NormedRing,
    seed: int,
    within: Optional[Set[int]] = None,
    attempts: int = 200,
) -> List[Chain]:
    """Closed random walks, freely reduced to chains, cycling through ``lengths``.

    Walks stay in ``within`` when given. Zero chains are discarded, so fewer
    than ``count`` cycles may come back.
    """
    rng = np.random.default_rng(seed)
    graph = complex.skeleton_graph()
    allowed = sorted(within) if within is not None else list(range(complex.n_vertices))
    allowed_set = set(allowed)
    neighbours = {v: sorted(u for u in graph[v] if u in allowed_set) for v in allowed}
    out = []
    for i in range(count):
        length = lengths[i % len(lengths)]
        for _ in range(attempts):
            start = allowed[int(rng.integers(len(allowed)))]
            walk = [start]
            for _ in range(length - 1):
                options = neighbours[walk[-1]]
                if not options:
                    break
                walk.append(options[int(rng.integers(len(options)))])
            if len(walk) != length or start not in neighbours[walk[-1]]:
                continue
            z = path_chain(complex, walk + [start], ring)
            if not z.is_zero():
                out.append(z)
                break
    return out


def coherent_patch(complex: Complex, k: int, cells: Sequence[int], ring: NormedRing) -> Chain:
    """k-chain on ``cells`` with signs chosen so shared faces cancel where possible."""
    cells = sorted(cells)
    members = set(cells)
    signs: Dict[int, int] = {}
    for root in cells:
        if root in signs:
            continue
        signs[root] = 1
        queue = [root]
        while queue:
            c = queue.pop(0)
            for face, e_c in complex.incidences(k, c):
                for other in complex.cofaces(k - 1, face):
                    other = int(other)
                    if other not in members or other in signs:
                        continue
                    e_o = next(s for f, s in complex.incidences(k, other) if f == face)
                    signs[other] = -signs[c] * e_c * e_o
                    queue.append(other)
    return Chain(complex, k, ring, signs)


def patch_cycles(
    complex: Complex,
    n: int,
    count: int,
    max_cells: int,
    ring: NormedRing,
    seed: int,
    within: Optional[Set[int]] = None,
) -> List[Chain]:
    """Boundaries of seeded random connected (n+1)-patches."""
    rng = np.random.default_rng(seed)
    k = n + 1
    pool = [
        c for c in range(complex.count(k))
        if within is None or set(complex.simplex(k, c)) <= within
    ]
    if not pool:
        return []
    pool_set = set(pool)
    out = []
    for _ in range(count):
        size = int(rng.integers(1, max_cells + 1))
        patch = [pool[int(rng.integers(len(pool)))]]
        members = set(patch)
        while len(patch) < size:
            frontier = sorted(
                int(o) for c in patch for f, _ in complex.incidences(k, c)
                for o in complex.cofaces(k - 1, f) if int(o) in pool_set and int(o) not in members
            )
            if not frontier:
                break
            pick = frontier[int(rng.integers(len(frontier)))]
            patch.append(pick)
            members.add(pick)
        z = boundary(coherent_patch(complex, k, patch, ring))
        if not z.is_zero():
            out.append(z)
    return out
