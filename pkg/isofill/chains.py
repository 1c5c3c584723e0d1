"""Finite simplicial complexes, sparse chains and the boundary operator.

Cells are ascending vertex tuples; the ascending order is the canonical
orientation. Vertex ``v`` is the 0-cell ``(v,)`` with id ``v``. Higher cells
get ids from their lexicographic rank within the dimension.
"""
from dataclasses import dataclass, field
import logging
from types import MappingProxyType
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import sparse

from isofill.errors import ContractError
from isofill.rings import Coefficient, NormedRing

logger = logging.getLogger("isofill.chains")

Simplex = Tuple[int, ...]
CellRef = Tuple[int, int]


def orient(vertices: Sequence[int]) -> Tuple[Simplex, int]:
    """Return the canonical simplex on ``vertices`` and the sign of the sorting permutation."""
    if len(set(vertices)) != len(vertices):
        raise ContractError(f"degenerate simplex {tuple(vertices)}")
    verts = list(vertices)
    sign = 1
    # bubble sort counts inversions; simplices are tiny
    for i in range(len(verts)):
        for j in range(len(verts) - 1 - i):
            if verts[j] > verts[j + 1]:
                verts[j], verts[j + 1] = verts[j + 1], verts[j]
                sign = -sign
    return tuple(verts), sign


def faces(simplex: Simplex) -> List[Tuple[Simplex, int]]:
    return [(simplex[:i] + simplex[i + 1:], -1 if i % 2 else 1) for i in range(len(simplex))]


class Complex:
    """A finite simplicial complex closed under faces.

    :param n_vertices: vertices are ``0 .. n_vertices - 1``
    :param simplices: simplices of dimension >= 1, any vertex order; faces are added
    :param metric: optional vertex metric handle (a FiniteMetric)
    :param metadata: builder provenance (radius, rips scale, attaching edges ...)
    """

    def __init__(
        self,
        n_vertices: int,
        simplices: Iterable[Sequence[int]] = (),
        metric: Optional[Any] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ):
        levels: List[set] = [set()]
        for s in simplices:
            canonical, _ = orient(s)
            if canonical[-1] >= n_vertices or canonical[0] < 0:
                raise ContractError(f"simplex {canonical} uses a vertex outside 0..{n_vertices - 1}")
            k = len(canonical) - 1
            if k == 0:
                continue
            while len(levels) <= k:
                levels.append(set())
            levels[k].add(canonical)
        for k in range(len(levels) - 1, 1, -1):
            for s in levels[k]:
                levels[k - 1].update(f for f, _ in faces(s))

        self.n_vertices = n_vertices
        self._cells: List[Tuple[Simplex, ...]] = [tuple((v,) for v in range(n_vertices))]
        self._cells += [tuple(sorted(level)) for level in levels[1:]]
        while len(self._cells) > 1 and not self._cells[-1]:
            self._cells.pop()
        self._index: List[Dict[Simplex, int]] = [
            {s: i for i, s in enumerate(level)} for level in self._cells
        ]
        self.metric = metric
        self.metadata: Dict[str, Any] = dict(metadata or {})
        self._boundary: Dict[int, sparse.csc_matrix] = {}
        self._cofaces: Dict[int, sparse.csr_matrix] = {}
        self._graph: Optional[nx.Graph] = None

    @property
    def dimension(self) -> int:
        return len(self._cells) - 1 if self.n_vertices else -1

    def cells(self, k: int) -> Tuple[Simplex, ...]:
        if k < 0 or k >= len(self._cells):
            return ()
        return self._cells[k]

    def count(self, k: int) -> int:
        return len(self.cells(k))

    def simplex(self, k: int, cid: int) -> Simplex:
        return self._cells[k][cid]

    def find(self, simplex: Sequence[int]) -> Optional[int]:
        k = len(simplex) - 1
        if k >= len(self._index):
            return None
        return self._index[k].get(tuple(simplex))

    def cell_id(self, simplex: Sequence[int]) -> int:
        cid = self.find(simplex)
        if cid is None:
            raise ContractError(f"simplex {tuple(simplex)} is not a cell of the complex")
        return cid

    def incidences(self, k: int, cid: int) -> List[Tuple[int, int]]:
        """Boundary incidences (face id, sign) of the k-cell ``cid``."""
        return [(self._index[k - 1][f], sign) for f, sign in faces(self._cells[k][cid])]

    def boundary_matrix(self, k: int) -> sparse.csc_matrix:
        """Sparse ∂_k with rows indexed by (k-1)-cells and columns by k-cells."""
        if k not in self._boundary:
            shape = (self.count(k - 1), self.count(k))
            if k < 1 or not shape[1]:
                self._boundary[k] = sparse.csc_matrix(shape, dtype=np.int32)
            else:
                arr = np.asarray(self._cells[k], dtype=np.int64)
                columns = np.arange(shape[1])
                rows, cols, data = [], [], []
                for i in range(k + 1):
                    face_rows = np.delete(arr, i, axis=1)
                    rows.append([self._index[k - 1][tuple(f)] for f in face_rows.tolist()])
                    cols.append(columns)
                    data.append(np.full(shape[1], -1 if i % 2 else 1, dtype=np.int32))
                self._boundary[k] = sparse.csc_matrix(
                    (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                    shape=shape,
                    dtype=np.int32,
                )
        return self._boundary[k]

    def cofaces(self, k: int, cid: int) -> np.ndarray:
        """Ids of the (k+1)-cells having the k-cell ``cid`` as a face."""
        if k + 1 > self.dimension:
            return np.empty(0, dtype=np.int64)
        if k not in self._cofaces:
            self._cofaces[k] = self.boundary_matrix(k + 1).tocsr()
        matrix = self._cofaces[k]
        return matrix.indices[matrix.indptr[cid]:matrix.indptr[cid + 1]]

    def skeleton_graph(self) -> nx.Graph:
        if self._graph is None:
            graph = nx.Graph()
            graph.add_nodes_from(range(self.n_vertices))
            graph.add_edges_from(self.cells(1))
            self._graph = graph
        return self._graph

    def max_degree(self) -> int:
        graph = self.skeleton_graph()
        return max((deg for _, deg in graph.degree()), default=0)

    def full(self) -> "Subcomplex":
        return Subcomplex(self, tuple(frozenset(range(self.count(k))) for k in range(self.dimension + 1)))

    def empty(self) -> "Subcomplex":
        return Subcomplex(self, tuple(frozenset() for _ in range(self.dimension + 1)))

    def __repr__(self) -> str:
        counts = ", ".join(str(self.count(k)) for k in range(self.dimension + 1))
        return f"Complex(dim={self.dimension}, cells=[{counts}])"


def check_boundary_squared(complex: Complex) -> bool:
    """True when ∂_{k-1}∂_k vanishes on every basis cell of every dimension."""
    for k in range(2, complex.dimension + 1):
        product = complex.boundary_matrix(k - 1) @ complex.boundary_matrix(k)
        if product.count_nonzero():
            logger.error(f"boundary squared is nonzero in dimension {k}")
            return False
    return True


@dataclass(frozen=True)
class Subcomplex:
    """Cells of a parent complex, kept under their parent ids."""

    complex: Complex = field(compare=False, repr=False)
    cells: Tuple[FrozenSet[int], ...]

    def ids(self, k: int) -> FrozenSet[int]:
        return self.cells[k] if 0 <= k < len(self.cells) else frozenset()

    def embedding(self, k: int) -> Tuple[int, ...]:
        """Parent id of every local cell, local ids being ranks in canonical order."""
        return tuple(sorted(self.ids(k)))

    @property
    def size(self) -> int:
        return sum(len(level) for level in self.cells)

    @property
    def dimension(self) -> int:
        nonempty = [k for k, level in enumerate(self.cells) if level]
        return nonempty[-1] if nonempty else -1

    def is_full(self) -> bool:
        return all(len(self.ids(k)) == self.complex.count(k) for k in range(self.complex.dimension + 1))

    def issubset(self, other: "Subcomplex") -> bool:
        return all(self.ids(k) <= other.ids(k) for k in range(len(self.cells)))

    def __contains__(self, ref: CellRef) -> bool:
        k, cid = ref
        return cid in self.ids(k)


def hull(complex: Complex, cells: Iterable[CellRef]) -> Subcomplex:
    """Smallest subcomplex containing ``cells``."""
    levels = [set() for _ in range(complex.dimension + 1)]
    for k, cid in cells:
        if not 0 <= cid < complex.count(k):
            raise ContractError(f"no {k}-cell with id {cid}")
        levels[k].add(cid)
    for k in range(complex.dimension, 0, -1):
        if levels[k]:
            matrix = complex.boundary_matrix(k)
            for cid in levels[k]:
                levels[k - 1].update(matrix.indices[matrix.indptr[cid]:matrix.indptr[cid + 1]].tolist())
    return Subcomplex(complex, tuple(frozenset(level) for level in levels))


def expand_neighborhood(complex: Complex, sub: Subcomplex) -> Subcomplex:
    """``sub`` plus every cell with a boundary face in ``sub``, closed under faces."""
    refs = [(k, cid) for k in range(complex.dimension + 1) for cid in sub.ids(k)]
    for k in range(complex.dimension):
        for cid in sub.ids(k):
            refs.extend((k + 1, int(c)) for c in complex.cofaces(k, cid))
    return hull(complex, refs)


@dataclass(frozen=True, eq=False)
class Chain:
    """Sparse k-chain: cell id -> nonzero coefficient."""

    complex: Complex
    dim: int
    ring: NormedRing
    coefficients: Mapping[int, Coefficient] = field(default_factory=dict)

    def __post_init__(self):
        count = self.complex.count(self.dim)
        clean = {}
        for cid, value in sorted(self.coefficients.items()):
            if not 0 <= cid < count:
                raise ContractError(f"no {self.dim}-cell with id {cid}")
            value = self.ring.coerce(value)
            if not self.ring.is_zero(value):
                clean[cid] = value
        object.__setattr__(self, "coefficients", MappingProxyType(clean))

    @classmethod
    def zero(cls, complex: Complex, dim: int, ring: NormedRing) -> "Chain":
        return cls(complex, dim, ring, {})

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(self.coefficients)

    def items(self) -> List[Tuple[int, Coefficient]]:
        return list(self.coefficients.items())

    def coefficient(self, cid: int) -> Coefficient:
        return self.coefficients.get(cid, self.ring.zero)

    def is_zero(self) -> bool:
        return not self.coefficients

    def __len__(self) -> int:
        return len(self.coefficients)

    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted({v for cid in self.coefficients for v in self.complex.simplex(self.dim, cid)}))

    def _check(self, other: "Chain"):
        if other.complex is not self.complex or other.dim != self.dim or other.ring != self.ring:
            raise ContractError("chains live in different complexes, dimensions or rings")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        total = dict(self.coefficients)
        for cid, value in other.coefficients.items():
            total[cid] = self.ring.add(total.get(cid, self.ring.zero), value)
        return Chain(self.complex, self.dim, self.ring, total)

    def __neg__(self) -> "Chain":
        return self.scale(self.ring.neg(self.ring.one))

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, r: Coefficient) -> "Chain":
        r = self.ring.coerce(r)
        return Chain(
            self.complex, self.dim, self.ring, {cid: self.ring.mul(r, v) for cid, v in self.coefficients.items()}
        )

    def restrict(self, ids: Iterable[int]) -> "Chain":
        keep = set(ids)
        return Chain(self.complex, self.dim, self.ring, {c: v for c, v in self.coefficients.items() if c in keep})

    def key(self) -> Tuple[int, Tuple[Tuple[int, Coefficient], ...]]:
        return self.dim, tuple(self.coefficients.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return (
            other.complex is self.complex
            and other.dim == self.dim
            and other.ring == self.ring
            and dict(other.coefficients) == dict(self.coefficients)
        )

    def __hash__(self) -> int:
        return hash((id(self.complex), self.ring, self.key()))

    def __repr__(self) -> str:
        return f"Chain(dim={self.dim}, ring={self.ring.spec}, {dict(self.coefficients)})"


def chain_from_simplex(complex: Complex, vertices: Sequence[int], ring: NormedRing, coefficient=1) -> Chain:
    """Chain of the oriented simplex ``vertices``, as ± its canonical cell."""
    canonical, sign = orient(vertices)
    value = ring.coerce(coefficient)
    if sign < 0:
        value = ring.neg(value)
    return Chain(complex, len(canonical) - 1, ring, {complex.cell_id(canonical): value})


def boundary(chain: Chain) -> Chain:
    if chain.dim < 1:
        raise ContractError("no boundary below dimension 1")
    ring = chain.ring
    total: Dict[int, Coefficient] = {}
    for cid, value in chain.coefficients.items():
        for face, sign in chain.complex.incidences(chain.dim, cid):
            term = value if sign > 0 else ring.neg(value)
            total[face] = ring.add(total.get(face, ring.zero), term)
    return Chain(chain.complex, chain.dim - 1, ring, total)


def l1_norm(chain: Chain) -> Coefficient:
    return sum(chain.ring.norm(v) for v in chain.coefficients.values())


def is_cycle(chain: Chain) -> bool:
    return boundary(chain).is_zero()


def split_connected_support(cycle: Chain) -> List[Chain]:
    """Split a cycle into cycles whose supports are connected through shared faces."""
    if cycle.dim < 1 or not is_cycle(cycle):
        raise ContractError("split_connected_support needs a cycle of dimension >= 1")
    graph = nx.Graph()
    for cid in cycle.support:
        graph.add_node(("cell", cid))
        for face, _ in cycle.complex.incidences(cycle.dim, cid):
            graph.add_edge(("cell", cid), ("face", face))
    parts = []
    for component in nx.connected_components(graph):
        ids = sorted(cid for kind, cid in component if kind == "cell")
        parts.append(cycle.restrict(ids))
    return sorted(parts, key=lambda part: part.support[0])


def support_refs(chain: Chain) -> List[CellRef]:
    return [(chain.dim, cid) for cid in chain.support]
