"""Lowest eigenvalue of the graph Laplacian with Dirichlet pendants.

Flower graphs admit a closed secular equation: with s = sqrt(lambda),

    2 * sum_j tan(s * l_j) = cot(s * L)

where L is the stem length and l_j the loop half-lengths.  The left side
increases and the right side decreases on s in (0, s_max) with
s_max = min(pi/(2L), min_j pi/(2 l_j)), so the smallest eigenvalue is the
unique root there.  General graphs go through the P1 discretization of
mesh.GraphMesh and inverse power iteration on the generalized problem
A x = lambda M x.

The derivative of a simple eigenvalue with respect to one edge length is
-(psi'^2 + lambda psi^2) evaluated on that edge; the quantity is constant
along the edge because psi'' = -lambda psi, which is what
eigenvalue_length_slope exploits (midpoint evaluation, second order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse.linalg as spla
from scipy.optimize import brentq

from .errors import (
    InvalidDomain,
    LinearSolveFailure,
    LoopTooLong,
    MeshTooCoarse,
)
from .graph import Edge, FlowerSpec, MetricGraph, flower_graph
from .mesh import Field, GraphMesh, field_from_function

__all__ = [
    "SpectralResult",
    "Region",
    "RegionReport",
    "lambda0_flower",
    "lambda0_discretized",
    "eigenvalue_length_slope",
    "region_membership",
    "lower_boundary",
    "lower_boundary_symmetric",
    "secular_mismatch",
]

BOUNDARY_TOL = 1e-10


@dataclass
class SpectralResult:
    lambda0: float
    eigenfunction: Field
    method: str              # "transcendental" | "discretized"
    residual: float
    iterations: int = 0


def secular_mismatch(spec: FlowerSpec, s: float) -> float:
    """2*sum tan(s*l_j) - cot(s*L); increasing in s on the root bracket."""
    t = 2.0 * sum(math.tan(s * h) for h in spec.loop_halves)
    return t - 1.0 / math.tan(s * spec.stem)


def _flower_eigenfunction(spec: FlowerSpec, s: float,
                          mesh_h: float | None) -> Field:
    """Sample the sin/cos eigenfunction branches, L2-normalized."""
    L = spec.stem
    # stem: sin(s x); loop j: (sin(sL)/cos(s l_j)) * cos(s (x - l_j))
    stem_sq = L / 2.0 - math.sin(2.0 * s * L) / (4.0 * s)
    total = stem_sq
    amp = {}
    for j, h in enumerate(spec.loop_halves, start=1):
        d = math.sin(s * L) / math.cos(s * h)
        amp[f"loop{j}"] = d
        total += d * d * (h + math.sin(2.0 * s * h) / (2.0 * s))
    c = 1.0 / math.sqrt(total)

    graph = flower_graph(spec)
    if mesh_h is None:
        mesh_h = max(min(0.02, min(e.length for e in graph.edges) / 8.0), 1e-4)
    mesh = GraphMesh(graph, mesh_h)

    def fn(edge_id, x):
        if edge_id == "stem":
            return c * np.sin(s * x)
        half = 0.5 * (x[-1] if len(x) else 0.0)
        return c * amp[edge_id] * np.cos(s * (x - half))

    return field_from_function(mesh, fn)


def lambda0_flower(spec: FlowerSpec, tol: float = 1e-12,
                   mesh_h: float | None = None) -> SpectralResult:
    """Smallest eigenvalue of a flower graph from the secular equation."""
    L = spec.stem
    if spec.n_loops == 0:
        s = math.pi / (2.0 * L)
        f = _flower_eigenfunction(spec, s, mesh_h)
        return SpectralResult(s * s, f, "transcendental", 0.0, 0)
    s_max = min([math.pi / (2.0 * L)] +
                [math.pi / (2.0 * h) for h in spec.loop_halves])
    lo = s_max * 1e-12
    hi = s_max * (1.0 - 1e-13)
    s, info = brentq(lambda s: secular_mismatch(spec, s), lo, hi,
                     xtol=max(tol * s_max, 1e-15), rtol=4.0 * np.finfo(float).eps,
                     maxiter=200, full_output=True)
    # polish to machine precision; the mismatch is strictly increasing so the
    # Newton step with its analytic derivative cannot leave the bracket
    for _ in range(3):
        f_val = secular_mismatch(spec, s)
        f_der = L / math.sin(s * L) ** 2
        f_der += 2.0 * sum(h / math.cos(s * h) ** 2 for h in spec.loop_halves)
        step = f_val / f_der
        if not math.isfinite(step):
            break
        s_new = min(max(s - step, lo), hi)
        if s_new == s:
            break
        s = s_new
    res = abs(secular_mismatch(spec, s))
    f = _flower_eigenfunction(spec, s, mesh_h)
    return SpectralResult(s * s, f, "transcendental", res, info.iterations)


def _inverse_iteration(mesh: GraphMesh) -> tuple[float, np.ndarray, float, int]:
    a, m = mesh.reduced_operators()
    try:
        lu = spla.splu(a.tocsc())
    except RuntimeError as exc:
        raise LinearSolveFailure(f"stiffness factorization failed: {exc}") from exc
    x = np.ones(a.shape[0])
    x /= math.sqrt(float(m @ (x * x)))
    rho_prev = math.inf
    for k in range(1, 301):
        y = lu.solve(m * x)
        y /= math.sqrt(float(m @ (y * y)))
        ay = a @ y
        rho = float(y @ ay) / float(m @ (y * y))
        r = ay - rho * (m * y)
        rel = math.sqrt(float(r @ r)) / (math.sqrt(float(ay @ ay)) + rho)
        x = y
        if abs(rho - rho_prev) <= 1e-12 * max(1.0, rho) and rel <= 1e-10:
            return rho, x, rel, k
        rho_prev = rho
    raise LinearSolveFailure("inverse iteration did not reach the residual target")


def lambda0_discretized(graph: MetricGraph, mesh_h: float,
                        intervals: dict[str, int] | None = None) -> SpectralResult:
    """Smallest eigenvalue of the P1-discretized Laplacian on any graph."""
    mesh = GraphMesh(graph, mesh_h, intervals=intervals)
    if mesh.min_intervals() < 5:
        raise MeshTooCoarse(
            f"coarsest edge has {mesh.min_intervals()} cells; need >= 5 "
            "(four interior nodes) for the eigenvalue stencil")
    rho, x, rel, k = _inverse_iteration(mesh)
    vals = np.zeros(mesh.n_nodes)
    vals[mesh.free_nodes] = x if x.sum() >= 0 else -x
    return SpectralResult(rho, Field(mesh, vals), "discretized", rel, k)


def eigenvalue_length_slope(graph: MetricGraph, edge_id: str,
                            mesh_h: float) -> tuple[float, float]:
    """(finite-difference, eigenfunction) values of d lambda0 / d length.

    Left entry: central difference of the discretized lambda0 as the named
    edge's length varies by +-1e-4*length, holding every interval count
    fixed so the difference is smooth.  Right entry:
    -(psi'^2 + lambda psi^2) from the unperturbed eigenfunction at the
    middle cell of that edge.  Both are negative.
    """
    lengths = {e.id: e.length for e in graph.edges}
    if edge_id not in lengths:
        raise InvalidDomain(f"no edge named {edge_id!r}")
    base = lambda0_discretized(graph, mesh_h)
    counts = dict(base.eigenfunction.mesh.intervals)

    def with_length(val: float) -> MetricGraph:
        edges = tuple(Edge(e.id, e.tail, e.head, val if e.id == edge_id else e.length)
                      for e in graph.edges)
        return MetricGraph(edges, dict(graph.conditions))

    delta = 1e-4 * lengths[edge_id]
    lam_plus = lambda0_discretized(with_length(lengths[edge_id] + delta),
                                   mesh_h, intervals=counts).lambda0
    lam_minus = lambda0_discretized(with_length(lengths[edge_id] - delta),
                                    mesh_h, intervals=counts).lambda0
    lhs = (lam_plus - lam_minus) / (2.0 * delta)

    mesh = base.eigenfunction.mesh
    psi = base.eigenfunction.values
    idx = mesh.edge_nodes[edge_id]
    h = mesh.edge_h[edge_id]
    k = (len(idx) - 1) // 2
    dpsi = (psi[idx[k + 1]] - psi[idx[k]]) / h
    pmid = 0.5 * (psi[idx[k + 1]] + psi[idx[k]])
    rhs = -(dpsi * dpsi + base.lambda0 * pmid * pmid)
    return lhs, rhs


class Region(Enum):
    TRIVIAL = "Trivial"
    NONTRIVIAL = "Nontrivial"


@dataclass(frozen=True)
class RegionReport:
    region: Region
    lambda0: float
    boundary: bool    # |lambda0 - 1| <= 1e-10: too close to classify firmly

    def __str__(self):
        tag = " (boundary)" if self.boundary else ""
        return f"{self.region.value}{tag}, lambda0={self.lambda0:.12g}"


def region_membership(spec: FlowerSpec) -> RegionReport:
    """Nontrivial iff lambda0 < 1 strictly; flags near-threshold ties."""
    lam = lambda0_flower(spec).lambda0
    region = Region.NONTRIVIAL if lam < 1.0 else Region.TRIVIAL
    return RegionReport(region, lam, abs(lam - 1.0) <= BOUNDARY_TOL)


def lower_boundary(loop_halves) -> float:
    """Critical stem length: lambda0 = 1 at L = arccot(2 sum tan l_j)."""
    total = 0.0
    for h in loop_halves:
        if h < 0.0 or h != h:
            raise InvalidDomain(f"loop half-length must be >= 0, got {h}")
        if h >= math.pi / 2.0:
            raise LoopTooLong(
                f"loop half-length {h} >= pi/2; tan diverges and the "
                "critical stem length is 0 already")
        total += math.tan(h)
    return math.pi / 2.0 - math.atan(2.0 * total)


def lower_boundary_symmetric(L: float, n_loops: int) -> float:
    """Critical common half-length for n_loops equal loops on stem L."""
    if n_loops < 1:
        raise InvalidDomain("need at least one loop")
    if not 0.0 < L < math.pi / 2.0:
        raise InvalidDomain(
            f"stem length {L} outside (0, pi/2); no finite critical loop "
            "length exists there")
    return math.atan(1.0 / (math.tan(L) * 2.0 * n_loops))
