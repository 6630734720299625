"""Discretization: shared-node grids, operators, fields, discrete energy."""

import math

import numpy as np
import pytest

from fkpp_graphs.errors import MeshTooCoarse
from fkpp_graphs.graph import FlowerSpec, flower_graph, interval_graph
from fkpp_graphs.mesh import (
    Field,
    GraphMesh,
    constant_field,
    field_from_function,
    field_from_profiles,
    free_energy,
)


def test_interval_counts_follow_mesh_h():
    mesh = GraphMesh(interval_graph(2.0), mesh_h=0.5)
    assert mesh.intervals == {"stem": 4}
    assert mesh.n_nodes == 5
    assert mesh.edge_h["stem"] == 0.5
    assert np.allclose(mesh.edge_x["stem"], [0.0, 0.5, 1.0, 1.5, 2.0])


def test_node_sharing_on_a_tadpole():
    g = flower_graph(FlowerSpec(stem=0.8, loop_halves=(0.75,)))
    mesh = GraphMesh(g, mesh_h=0.25)
    assert mesh.intervals == {"stem": 4, "loop1": 6}
    # 2 vertices + 3 + 5 interior nodes
    assert mesh.n_nodes == 10
    stem = mesh.edge_nodes["stem"]
    loop = mesh.edge_nodes["loop1"]
    # the stem head and both loop ends are the same shared center node
    assert stem[-1] == loop[0] == loop[-1] == mesh.vertex_node["c"]
    assert stem[0] == mesh.vertex_node["b"]
    assert mesh.dirichlet_nodes.tolist() == [mesh.vertex_node["b"]]
    assert mesh.free_nodes.size == mesh.n_nodes - 1


def test_mesh_too_coarse():
    with pytest.raises(MeshTooCoarse):
        GraphMesh(interval_graph(1.0))
    with pytest.raises(MeshTooCoarse):
        GraphMesh(interval_graph(1.0), mesh_h=-0.1)
    with pytest.raises(MeshTooCoarse):
        GraphMesh(interval_graph(1.0), intervals={"stem": 1})


def test_stiffness_is_symmetric_with_zero_row_sums():
    g = flower_graph(FlowerSpec(stem=0.8, loop_halves=(0.75, 0.5)))
    mesh = GraphMesh(g, mesh_h=0.1)
    a = mesh.stiffness
    assert abs(a - a.T).max() == 0.0
    ones = np.ones(mesh.n_nodes)
    assert np.max(np.abs(a @ ones)) <= 1e-12


def test_lumped_mass_total_is_graph_length():
    g = flower_graph(FlowerSpec(stem=0.51, loop_halves=(0.8, 0.5)))
    mesh = GraphMesh(g, mesh_h=0.03)
    assert math.isclose(mesh.lumped_mass.sum(), g.total_length(), rel_tol=1e-13)
    assert np.all(mesh.lumped_mass > 0.0)


def test_reduced_stiffness_is_positive_definite():
    g = flower_graph(FlowerSpec(stem=0.8, loop_halves=(0.75,)))
    a, m = GraphMesh(g, mesh_h=0.05).reduced_operators()
    assert abs(a - a.T).max() <= 1e-14
    rng = np.random.default_rng(7)
    for _ in range(5):
        x = rng.standard_normal(a.shape[0])
        assert x @ (a @ x) > 0.0
    assert m.shape == (a.shape[0],)


def test_field_shape_is_checked():
    mesh = GraphMesh(interval_graph(1.0), mesh_h=0.25)
    with pytest.raises(ValueError):
        Field(mesh, np.zeros(3))


def test_constant_field_pins_dirichlet():
    mesh = GraphMesh(interval_graph(1.0), mesh_h=0.25)
    f = constant_field(mesh, 0.7)
    assert f.values[mesh.vertex_node["b"]] == 0.0
    assert f.sup_norm == 0.7
    assert f.min_value() == 0.0
    c = f.copy()
    c.values[:] = 0.0
    assert f.sup_norm == 0.7


def test_field_from_function_averages_vertex_samples():
    g = flower_graph(FlowerSpec(stem=1.0, loop_halves=(0.5,)))
    mesh = GraphMesh(g, mesh_h=0.25)

    def fn(edge_id, x):
        return np.full_like(x, 1.0 if edge_id == "stem" else 4.0)

    f = field_from_function(mesh, fn)
    # center collects one stem sample and the two loop ends
    assert math.isclose(f.values[mesh.vertex_node["c"]], 3.0)
    assert f.values[mesh.vertex_node["b"]] == 0.0


def test_field_from_profiles_exact_on_linear_data():
    mesh = GraphMesh(interval_graph(2.0), mesh_h=0.1)
    xs = np.linspace(0.0, 2.0, 7)
    f = field_from_profiles(mesh, {"stem": (xs, 0.25 * xs)})
    x, u = f.on_edge("stem")
    assert np.max(np.abs(u - 0.25 * x)) <= 1e-15


def test_free_energy_of_zero_field():
    mesh = GraphMesh(interval_graph(2.0), mesh_h=0.1)
    assert free_energy(constant_field(mesh, 0.0)) == 0.0


def test_free_energy_second_order_against_closed_form():
    # u = sin(pi x / (2L)) on [0, L]:
    #   int (u')^2 = pi^2/(8L), int u^2 = L/2, int u^3 = 4L/(3 pi)
    L = 2.0
    exact = math.pi ** 2 / (16.0 * L) - L / 4.0 + 4.0 * L / (9.0 * math.pi)
    g = interval_graph(L)

    def sample(h):
        mesh = GraphMesh(g, mesh_h=h)
        f = field_from_function(
            mesh, lambda eid, x: np.sin(math.pi * x / (2.0 * L)))
        return abs(free_energy(f) - exact)

    e1, e2 = sample(0.02), sample(0.01)
    assert e1 <= 1e-3
    assert 3.4 <= e1 / e2 <= 4.6
