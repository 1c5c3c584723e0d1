"""Group presentations and balls in their Cayley complexes.

Words are strings over the generator letters; an uppercase letter is the
inverse of its lowercase generator.
"""
from collections import defaultdict
from dataclasses import dataclass
import logging
import time
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import networkx as nx

from isofill.builders.metrics import FiniteMetric, Truncation
from isofill.chains import Complex
from isofill.errors import ConfigurationError, ContractError

logger = logging.getLogger("isofill.builders")


def invert(word: str) -> str:
    return word[::-1].swapcase()


def free_reduce(word: str) -> str:
    out: List[str] = []
    for letter in word:
        if out and out[-1] == letter.swapcase():
            out.pop()
        else:
            out.append(letter)
    return "".join(out)


@dataclass(frozen=True)
class Presentation:
    generators: Tuple[str, ...]
    relators: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        for g in self.generators:
            if len(g) != 1 or not g.islower():
                raise ConfigurationError(f"generator names are single lowercase letters, got {g!r}")
        if len(set(self.generators)) != len(self.generators):
            raise ConfigurationError("repeated generator name")
        alphabet = set(self.generators) | {g.upper() for g in self.generators}
        for r in self.relators:
            if not r:
                raise ConfigurationError("relators must be nonempty")
            if set(r) - alphabet:
                raise ConfigurationError(f"relator {r!r} uses letters outside {sorted(alphabet)}")
            if free_reduce(r) != r:
                raise ConfigurationError(f"relator {r!r} is not freely reduced")

    @property
    def letters(self) -> Tuple[str, ...]:
        """Generators then inverses, the order balls are explored in."""
        return self.generators + tuple(g.upper() for g in self.generators)

    def exponent_vector(self, word: str) -> Tuple[int, ...]:
        return tuple(word.count(g) - word.count(g.upper()) for g in self.generators)


PRESETS: Dict[str, Tuple[Presentation, str]] = {
    "z": (Presentation(("a",)), "abelian"),
    "f2": (Presentation(("a", "b")), "free"),
    "f3": (Presentation(("a", "b", "c")), "free"),
    "z2": (Presentation(("a", "b"), ("abAB",)), "abelian"),
    "z2ab": (Presentation(("a", "b", "c"), ("abAB", "cBA")), "abelian"),
    "genus2": (Presentation(("a", "b", "c", "d"), ("abABcdCD",)), "dehn"),
}

# images of the generators in Z^k for the abelian presets
ABELIAN_IMAGES: Dict[str, Dict[str, Tuple[int, ...]]] = {
    "z": {"a": (1,)},
    "z2": {"a": (1, 0), "b": (0, 1)},
    "z2ab": {"a": (1, 0), "b": (0, 1), "c": (1, 1)},
}


class _Lookup:
    """Identifies words with discovered vertices."""

    def find(self, word: str) -> Optional[int]:
        raise NotImplementedError

    def insert(self, word: str, vertex: int):
        raise NotImplementedError


class _KeyLookup(_Lookup):
    def __init__(self, key):
        self.key = key
        self.table: Dict[Hashable, int] = {}

    def find(self, word):
        return self.table.get(self.key(word))

    def insert(self, word, vertex):
        self.table[self.key(word)] = vertex


class _DehnLookup(_Lookup):
    """Word identification by Dehn's algorithm on the symmetrized relators.

    Two words name the same element when Dehn reduction of ``w1·w2⁻¹`` is
    empty. Candidates are bucketed by exponent vector whenever every relator
    has zero exponent sums.
    """

    def __init__(self, presentation: Presentation):
        self.presentation = presentation
        self.rewrites: Dict[str, str] = {}
        for r in presentation.relators:
            for rel in (r, invert(r)):
                for i in range(len(rel)):
                    rotated = rel[i:] + rel[:i]
                    for cut in range(len(rel) // 2 + 1, len(rel) + 1):
                        piece, rest = rotated[:cut], rotated[cut:]
                        replacement = invert(rest)
                        if piece not in self.rewrites or len(replacement) < len(self.rewrites[piece]):
                            self.rewrites[piece] = replacement
        self.pieces = sorted(self.rewrites, key=len, reverse=True)
        self.bucketed = all(not any(presentation.exponent_vector(r)) for r in presentation.relators)
        self.buckets: Dict[Hashable, List[Tuple[str, int]]] = defaultdict(list)

    def reduce(self, word: str) -> str:
        word = free_reduce(word)
        changed = True
        while changed:
            changed = False
            for piece in self.pieces:
                at = word.find(piece)
                if at >= 0:
                    word = free_reduce(word[:at] + self.rewrites[piece] + word[at + len(piece):])
                    changed = True
                    break
        return word

    def _bucket(self, word: str) -> Hashable:
        return self.presentation.exponent_vector(word) if self.bucketed else ()

    def find(self, word):
        for rep, vertex in self.buckets.get(self._bucket(word), ()):
            if not self.reduce(word + invert(rep)):
                return vertex
        return None

    def insert(self, word, vertex):
        self.buckets[self._bucket(word)].append((word, vertex))


def _lookup_for(presentation: Presentation, kind: str, preset: Optional[str]) -> _Lookup:
    if kind == "free":
        return _KeyLookup(free_reduce)
    if kind == "abelian":
        images = ABELIAN_IMAGES[preset]
        rank = len(next(iter(images.values())))

        def key(word: str) -> Tuple[int, ...]:
            total = [0] * rank
            for letter in word:
                sign = -1 if letter.isupper() else 1
                for i, x in enumerate(images[letter.lower()]):
                    total[i] += sign * x
            return tuple(total)

        return _KeyLookup(key)
    return _DehnLookup(presentation)


def classify_presentation(p: Presentation) -> Tuple[str, Optional[str], bool]:
    """Identification strategy for ``p``, the matching preset name, and whether it is certified."""
    for name, (preset, kind) in PRESETS.items():
        if preset == p:
            return kind, name, True
    if not p.relators:
        return "free", None, True
    return "dehn", None, False


def cayley_ball(p: Presentation, radius: int, logger=logger) -> Tuple[Complex, FiniteMetric]:
    """Ball of the Cayley complex of ``p`` around the identity (vertex 0).

    Relator polygons lying entirely in the ball are glued as fan-triangulated
    disks from their least vertex. The metric is the Cayley graph metric,
    so triangulation diagonals do not shorten distances.
    """
    if radius < 0:
        raise ContractError("radius must be >= 0")
    start = time.time()
    kind, preset, certified = classify_presentation(p)
    if not certified:
        logger.warning("vertex identification is heuristic beyond free reductions")
    lookup = _lookup_for(p, kind, preset)
    words = [""]
    lookup.insert("", 0)
    labels: Dict[Tuple[int, int], Tuple[int, int, str]] = {}
    frontier = [0]
    for r in range(radius + 1):
        grow = r < radius
        next_frontier = []
        for vertex in frontier:
            for letter in p.letters:
                word = free_reduce(words[vertex] + letter)
                target = lookup.find(word)
                if target is None:
                    if not grow:
                        continue
                    target = len(words)
                    words.append(word)
                    lookup.insert(word, target)
                    next_frontier.append(target)
                if target != vertex:
                    edge = (min(vertex, target), max(vertex, target))
                    labels.setdefault(edge, (vertex, target, letter))
        frontier = next_frontier

    graph = nx.Graph()
    graph.add_nodes_from(range(len(words)))
    graph.add_edges_from(labels)

    polygons = set()
    for vertex in range(len(words)):
        for relator in p.relators:
            cycle = _trace_relator(words[vertex], relator, vertex, lookup)
            if cycle is not None:
                polygons.add(_canonical_polygon(cycle))
    triangles = []
    for polygon in sorted(polygons):
        triangles.extend(_fan(polygon))

    convex = not p.relators
    metric = FiniteMetric.from_graph(graph, epsilon=1, truncation=Truncation(0, radius, convex))
    metadata = {
        "builder": "cayley_ball",
        "presentation": {"generators": list(p.generators), "relators": list(p.relators)},
        "radius": radius,
        "center": 0,
        "certified": certified,
        "convex": convex,
        "epsilon": 1,
        "attaching_edges": max((len(r) for r in p.relators), default=None),
        "vertex_words": words,
        "labels": [list(labels[e]) for e in sorted(labels)],
    }
    complex = Complex(len(words), list(labels) + triangles, metric=metric, metadata=metadata)
    logger.info(
        f"Cayley ball of radius {radius}: {len(words)} vertices, {len(polygons)} relator disks, "
        f"took {time.time() - start:.2f} seconds"
    )
    return complex, metric


def _trace_relator(base_word: str, relator: str, base: int, lookup: _Lookup) -> Optional[List[int]]:
    cycle = [base]
    word = base_word
    for letter in relator[:-1]:
        word = free_reduce(word + letter)
        vertex = lookup.find(word)
        if vertex is None:
            return None
        cycle.append(vertex)
    if lookup.find(free_reduce(word + relator[-1])) != base:
        return None
    return cycle


def _canonical_polygon(cycle: Sequence[int]) -> Tuple[int, ...]:
    at = cycle.index(min(cycle))
    forward = tuple(cycle[at:]) + tuple(cycle[:at])
    backward = (forward[0],) + tuple(reversed(forward[1:]))
    return min(forward, backward)


def _fan(polygon: Tuple[int, ...]) -> List[Tuple[int, int, int]]:
    apex = polygon[0]
    triangles = []
    for a, b in zip(polygon[1:-1], polygon[2:]):
        if len({apex, a, b}) == 3:
            triangles.append((apex, a, b))
    return triangles


def trace_word(complex: Complex, start: int, word: str) -> List[int]:
    """Vertex path spelled by ``word`` from ``start``, using the ball's edge labels."""
    labels = complex.metadata.get("labels")
    if labels is None:
        raise ContractError("complex carries no generator labels")
    step: Dict[Tuple[int, str], int] = {}
    for u, v, letter in labels:
        step[(u, letter)] = v
        step[(v, letter.swapcase())] = u
    path = [start]
    for letter in word:
        nxt = step.get((path[-1], letter))
        if nxt is None:
            raise ContractError(f"word {word!r} leaves the ball at vertex {path[-1]}")
        path.append(nxt)
    return path
