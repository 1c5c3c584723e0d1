"""On-disk formats.

Complexes, chains and reduction traces are YAML documents written in
canonical order, so equal objects give byte-identical files. Profiles and
plot data are CSV tables with ``#`` comment headers.
"""
import csv
from fractions import Fraction
import io
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import yaml

from isofill.builders.groups import Presentation
from isofill.builders.metrics import FiniteMetric, Truncation
from isofill.chains import Chain, Complex
from isofill.errors import ConfigurationError, ContractError
from isofill.profiler.profile import GrowthClass, IsoProfile, ProfileEntry
from isofill.rings import NormedRing, format_coefficient, make_ring, parse_coefficient
from isofill.solver import Status

logger = logging.getLogger("isofill.formats")

COMPLEX_FORMAT = "isofill-complex/1"
CHAIN_FORMAT = "isofill-chain/1"
TRACE_FORMAT = "isofill-trace/1"

PathLike = Union[str, Path]


def _dump(document: Dict, path: PathLike):
    with open(path, "w") as f:
        yaml.safe_dump(document, f, sort_keys=False, default_flow_style=None, width=120)


def _load(path: PathLike, expected: str) -> Dict:
    with open(path, "r") as f:
        document = yaml.safe_load(f)
    if not isinstance(document, dict) or document.get("format") != expected:
        raise ConfigurationError(f"{path} is not an {expected} file")
    return document


def _plain(value: Any) -> Any:
    """Metadata values as YAML-safe builtins."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def complex_to_dict(complex: Complex) -> Dict:
    document: Dict[str, Any] = {
        "format": COMPLEX_FORMAT,
        "n_vertices": complex.n_vertices,
        "cells": {k: [list(s) for s in complex.cells(k)] for k in range(1, complex.dimension + 1)},
        "metadata": _plain(complex.metadata),
    }
    metric = complex.metric
    if metric is not None:
        section: Dict[str, Any] = {"epsilon": str(metric.epsilon)}
        if metric.graph is not None:
            section["kind"] = "graph"
            section["edges"] = sorted([min(u, v), max(u, v)] for u, v in metric.graph.edges())
        else:
            section["kind"] = "matrix"
            section["scale"] = metric.scale
            section["rows"] = metric.scaled.tolist()
        if metric.truncation is not None:
            t = metric.truncation
            section["truncation"] = {"center": t.center, "radius": t.radius, "convex": t.convex}
        document["metric"] = section
    return document


def complex_from_dict(document: Dict) -> Complex:
    n = int(document["n_vertices"])
    simplices = [tuple(s) for k in sorted(document.get("cells") or {}) for s in document["cells"][k]]
    metric = None
    section = document.get("metric")
    if section:
        truncation = None
        if section.get("truncation"):
            t = section["truncation"]
            truncation = Truncation(int(t["center"]), int(t["radius"]), bool(t["convex"]))
        epsilon = Fraction(section.get("epsilon", "1"))
        if section["kind"] == "graph":
            graph = nx.Graph()
            graph.add_nodes_from(range(n))
            graph.add_edges_from(tuple(e) for e in section["edges"])
            metric = FiniteMetric.from_graph(graph, epsilon=epsilon, truncation=truncation)
        elif section["kind"] == "matrix":
            scale = int(section["scale"])
            metric = FiniteMetric.from_matrix(
                [[Fraction(x, scale) for x in row] for row in section["rows"]], epsilon=epsilon
            )
            metric.truncation = truncation
        else:
            raise ConfigurationError(f"unknown metric kind {section['kind']!r}")
    return Complex(n, simplices, metric=metric, metadata=document.get("metadata") or {})


def save_complex(complex: Complex, path: PathLike):
    _dump(complex_to_dict(complex), path)


def load_complex(path: PathLike) -> Complex:
    return complex_from_dict(_load(path, COMPLEX_FORMAT))


def save_chain(chain: Chain, path: PathLike, extra: Optional[Dict] = None):
    """Cells are written as vertex tuples so files stay readable without the complex."""
    document: Dict[str, Any] = {
        "format": CHAIN_FORMAT,
        "ring": chain.ring.spec,
        "dim": chain.dim,
        "cells": [
            [list(chain.complex.simplex(chain.dim, cid)), format_coefficient(chain.ring, v)]
            for cid, v in chain.items()
        ],
    }
    if extra:
        document.update(_plain(extra))
    _dump(document, path)


def load_chain(path: PathLike, complex: Complex, ring: Optional[NormedRing] = None) -> Chain:
    """Load a chain; an explicit ``ring`` overrides the file's ring."""
    document = _load(path, CHAIN_FORMAT)
    ring = ring or make_ring(document["ring"])
    dim = int(document["dim"])
    total: Dict[int, Any] = {}
    for vertices, text in document.get("cells") or []:
        if len(vertices) != dim + 1:
            raise ContractError(f"cell {vertices} is not {dim}-dimensional")
        cid = complex.cell_id(tuple(vertices))
        total[cid] = ring.add(total.get(cid, ring.zero), parse_coefficient(ring, str(text)))
    return Chain(complex, dim, ring, total)


def save_trace(trace, path: PathLike, extra: Optional[Dict] = None):
    document: Dict[str, Any] = {
        "format": TRACE_FORMAT,
        "certified": trace.certified,
        "cells_used": trace.cells_used,
        "steps": [step.as_dict() for step in trace.steps],
    }
    if extra:
        document.update(_plain(extra))
    _dump(document, path)


def load_presentation(path: PathLike) -> Presentation:
    """YAML file with ``generators`` (letters) and ``relators`` (words)."""
    with open(path, "r") as f:
        document = yaml.safe_load(f) or {}
    return Presentation(tuple(document.get("generators") or ()), tuple(document.get("relators") or ()))


def load_metric(path: PathLike, epsilon=1) -> FiniteMetric:
    """Distance matrix, one row per line, comma separated; rationals as ``p/q``."""
    with open(path, "r") as f:
        rows = [row for row in csv.reader(line for line in f if line.strip() and not line.startswith("#"))]
    return FiniteMetric.from_matrix([[Fraction(x.strip()) for x in row] for row in rows], epsilon=epsilon)


def load_loop(path: PathLike) -> List[int]:
    """Vertex path, whitespace or comma separated."""
    with open(path, "r") as f:
        text = f.read().replace(",", " ")
    return [int(x) for x in text.split()]


def _header(lines: Sequence[Tuple[str, Any]]) -> str:
    return "".join(f"# {key}: {value}\n" for key, value in lines)


def write_profile(profile: IsoProfile, path: PathLike, echo: Optional[Dict] = None):
    """l, f_hat, mode, samples, worst_status rows under a provenance header."""
    header = [
        ("complex", profile.complex_id),
        ("dim", profile.n),
        ("ring", profile.ring),
        ("l_exhaustive", profile.l_exhaustive),
        ("seed", profile.seed),
    ]
    header += sorted((echo or {}).items())
    buffer = io.StringIO()
    buffer.write(_header(header))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["l", "f_hat", "mode", "samples", "worst_status"])
    for e in profile.entries:
        writer.writerow([e.l, str(e.f_hat), e.mode, e.samples, e.worst_status.value])
    Path(path).write_text(buffer.getvalue())


def read_profile(path: PathLike) -> IsoProfile:
    header: Dict[str, str] = {}
    rows = []
    with open(path, "r") as f:
        for line in f:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                header[key.strip()] = value.strip()
            elif line.strip():
                rows.append(line)
    table = list(csv.DictReader(rows))
    entries = [
        ProfileEntry(int(r["l"]), _number(r["f_hat"]), r["mode"], int(r["samples"]), Status(r["worst_status"]))
        for r in table
    ]
    seed = header.get("seed")
    return IsoProfile(
        complex_id=header.get("complex", ""),
        n=int(header.get("dim", 1)),
        ring=header.get("ring", ""),
        entries=entries,
        l_exhaustive=int(header.get("l_exhaustive", 0)),
        seed=None if seed in (None, "None") else int(seed),
    )


def _number(text: str):
    value = Fraction(text)
    return value.numerator if value.denominator == 1 else value


def write_plotdata(profile: IsoProfile, growth: GrowthClass, path: PathLike):
    """l, f_hat, fit rows; the fitted exponent goes in the header."""
    buffer = io.StringIO()
    buffer.write(
        _header(
            [
                ("complex", profile.complex_id),
                ("dim", profile.n),
                ("ring", profile.ring),
                ("alpha", f"{growth.alpha:.6f}"),
                ("intercept", f"{growth.intercept:.6f}"),
                ("label", growth.label),
            ]
        )
    )
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["l", "f_hat", "fit"])
    for l, f in profile.pairs():
        fit = float(np.exp(growth.intercept) * float(l) ** growth.alpha)
        writer.writerow([l, str(f), f"{fit:.6f}"])
    Path(path).write_text(buffer.getvalue())
