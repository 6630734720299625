"""Compact metric graphs and the flower subclass.

A metric graph is a combinatorial graph whose edges carry positive lengths;
self-loops and parallel edges are allowed.  Vertices are either ``dirichlet``
(the state is pinned to zero there; must be pendant, i.e. degree one) or
``kirchhoff`` (continuity plus zero total outward flux; a degree-one
kirchhoff vertex is a plain Neumann end).

A *flower* is the one-pendant special case the exact machinery handles: a
stem from the Dirichlet vertex to a center, plus N >= 0 loops attached at the
center.  ``FlowerSpec`` stores the stem length and the loop *half*-lengths;
every user-facing format (JSON shorthand, CLI) takes total loop lengths and
halves them on ingestion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (
    DisconnectedGraph,
    InvalidDomain,
    NonpositiveLength,
    NoPendant,
)

__all__ = [
    "Edge",
    "MetricGraph",
    "FlowerSpec",
    "ValidationReport",
    "validate",
    "as_flower",
    "flower_graph",
    "interval_graph",
    "graph_from_dict",
    "graph_from_json",
]

DIRICHLET = "dirichlet"
KIRCHHOFF = "kirchhoff"


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: float


@dataclass(frozen=True)
class MetricGraph:
    """Vertices, edges with lengths, and a boundary condition per vertex.

    Construction is permissive; ``validate`` checks the invariants.
    """

    edges: tuple[Edge, ...]
    conditions: dict[str, str] = field(default_factory=dict)

    @property
    def vertices(self) -> list[str]:
        seen: dict[str, None] = {}
        for e in self.edges:
            seen.setdefault(e.tail)
            seen.setdefault(e.head)
        for v in self.conditions:
            seen.setdefault(v)
        return list(seen)

    def degree(self, v: str) -> int:
        d = 0
        for e in self.edges:
            if e.tail == v:
                d += 1
            if e.head == v:
                d += 1
        return d

    def condition(self, v: str) -> str:
        return self.conditions.get(v, KIRCHHOFF)

    def total_length(self) -> float:
        return sum(e.length for e in self.edges)


@dataclass(frozen=True)
class ValidationReport:
    connected: bool
    dirichlet_vertices: tuple[str, ...]
    degrees: dict[str, int]
    messages: tuple[str, ...] = ()


def validate(graph: MetricGraph) -> ValidationReport:
    """Check the structural invariants, raising on the first violation.

    Raises NonpositiveLength, DisconnectedGraph or NoPendant; returns a
    report with connectivity, the Dirichlet vertex list and the degree table.
    """
    if not graph.edges:
        raise DisconnectedGraph("graph has no edges")
    for e in graph.edges:
        if not (e.length > 0.0) or e.length != e.length or e.length == float("inf"):
            raise NonpositiveLength(
                f"edge {e.id!r} has length {e.length!r}; lengths must be "
                "positive and finite")
    for v, c in graph.conditions.items():
        if c not in (DIRICHLET, KIRCHHOFF):
            raise InvalidDomain(f"unknown condition {c!r} at vertex {v!r}")

    verts = graph.vertices
    degrees = {v: graph.degree(v) for v in verts}

    # connectivity over the edge set
    adj: dict[str, set[str]] = {v: set() for v in verts}
    for e in graph.edges:
        adj[e.tail].add(e.head)
        adj[e.head].add(e.tail)
    stack = [verts[0]]
    reached = {verts[0]}
    while stack:
        for w in adj[stack.pop()]:
            if w not in reached:
                reached.add(w)
                stack.append(w)
    if len(reached) != len(verts):
        missing = sorted(set(verts) - reached)
        raise DisconnectedGraph(f"vertices unreachable from {verts[0]!r}: {missing}")

    dirichlet = tuple(v for v in verts if graph.condition(v) == DIRICHLET)
    if not dirichlet:
        raise NoPendant("no Dirichlet vertex; the zero boundary set is empty")
    for v in dirichlet:
        if degrees[v] != 1:
            raise NoPendant(
                f"Dirichlet vertex {v!r} has degree {degrees[v]}; Dirichlet "
                "vertices must be pendant (degree one)")

    return ValidationReport(
        connected=True,
        dirichlet_vertices=dirichlet,
        degrees=degrees,
    )


@dataclass(frozen=True)
class FlowerSpec:
    """Stem length plus loop half-lengths of a one-pendant flower."""

    stem: float
    loop_halves: tuple[float, ...] = ()

    def __post_init__(self):
        if not (self.stem > 0.0):
            raise NonpositiveLength(f"stem length must be positive, got {self.stem}")
        for h in self.loop_halves:
            if not (h > 0.0):
                raise NonpositiveLength(f"loop half-length must be positive, got {h}")
        object.__setattr__(self, "loop_halves", tuple(float(h) for h in self.loop_halves))

    @property
    def n_loops(self) -> int:
        return len(self.loop_halves)


def flower_graph(spec: FlowerSpec) -> MetricGraph:
    """Expand a FlowerSpec into an explicit MetricGraph.

    Edge ids: "stem" from the Dirichlet vertex "b" to the center "c", then
    "loop1".. as self-loops at "c" with length twice the half-length.
    """
    edges = [Edge("stem", "b", "c", float(spec.stem))]
    for j, h in enumerate(spec.loop_halves, start=1):
        edges.append(Edge(f"loop{j}", "c", "c", 2.0 * h))
    return MetricGraph(tuple(edges), {"b": DIRICHLET, "c": KIRCHHOFF})


def interval_graph(length: float) -> MetricGraph:
    """Interval [0, L]: Dirichlet at one end, free (Neumann) at the other."""
    return flower_graph(FlowerSpec(stem=length))


def as_flower(graph: MetricGraph) -> FlowerSpec | None:
    """Recognize a flower up to relabeling; None when the shape is different.

    Requires exactly one Dirichlet pendant, its neighbor as the only other
    vertex, and all remaining edges to be self-loops at that neighbor.
    """
    try:
        report = validate(graph)
    except Exception:
        return None
    if len(report.dirichlet_vertices) != 1:
        return None
    b = report.dirichlet_vertices[0]
    stems = [e for e in graph.edges if b in (e.tail, e.head)]
    if len(stems) != 1 or stems[0].tail == stems[0].head:
        return None
    stem = stems[0]
    c = stem.head if stem.tail == b else stem.tail
    if graph.condition(c) != KIRCHHOFF:
        return None
    halves = []
    for e in graph.edges:
        if e is stem:
            continue
        if not (e.tail == c and e.head == c):
            return None
        halves.append(e.length / 2.0)
    if set(graph.vertices) != {b, c}:
        return None
    return FlowerSpec(stem=stem.length, loop_halves=tuple(halves))


def graph_from_dict(data: dict) -> MetricGraph:
    """Build a graph from the JSON object form.

    Two shapes are accepted:

      {"edges": [{"id": "e1", "from": "v0", "to": "v1", "length": 2.0}, ...],
       "conditions": {"v0": "dirichlet", "v1": "kirchhoff"}}

      {"flower": {"stem": 0.8, "loops": [1.5]}}     (loops = total lengths)
    """
    if not isinstance(data, dict):
        raise InvalidDomain("graph JSON must be an object")
    if "flower" in data:
        fl = data["flower"]
        if not isinstance(fl, dict) or "stem" not in fl:
            raise InvalidDomain('"flower" needs a "stem" and optional "loops"')
        loops = fl.get("loops", [])
        if not isinstance(loops, (list, tuple)):
            raise InvalidDomain('"loops" must be a list of total loop lengths')
        spec = FlowerSpec(stem=float(fl["stem"]),
                          loop_halves=tuple(float(t) / 2.0 for t in loops))
        return flower_graph(spec)
    if "edges" not in data:
        raise InvalidDomain('graph JSON needs "edges" or "flower"')
    edges = []
    for k, ed in enumerate(data["edges"]):
        try:
            edges.append(Edge(
                id=str(ed.get("id", f"e{k}")),
                tail=str(ed["from"]),
                head=str(ed["to"]),
                length=float(ed["length"]),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDomain(f"bad edge entry {ed!r}: {exc}") from exc
    conditions = {str(v): str(c).lower()
                  for v, c in data.get("conditions", {}).items()}
    return MetricGraph(tuple(edges), conditions)


def graph_from_json(text: str) -> MetricGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidDomain(f"not valid JSON: {exc}") from exc
    return graph_from_dict(data)
