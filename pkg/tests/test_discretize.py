import numpy as np
import pytest

from suplab.discretize import (
    BoundarySpec,
    DiscreteField,
    MeshSpec,
    gradient,
    interpolate_boundary,
)
from suplab.energy import DensitySpec, eval_supremal
from suplab.exponent_space import StructuralError


def mesh_1d(cells=100, g0=0.0, g1=1.0, extent=1.0):
    return MeshSpec(1, (extent,), (cells,), BoundarySpec.endpoints(g0, g1))


def mesh_2d(cells=(8, 8), trace=None):
    trace = trace or BoundarySpec.affine(0.0, 1.0, 0.0)
    return MeshSpec(2, (1.0, 1.0), cells, trace)


class TestMeshSpec:
    def test_needs_two_cells(self):
        with pytest.raises(StructuralError):
            MeshSpec(1, (1.0,), (1,), BoundarySpec.endpoints(0, 1))

    def test_positive_extent(self):
        with pytest.raises(StructuralError):
            MeshSpec(1, (0.0,), (4,), BoundarySpec.endpoints(0, 1))

    def test_endpoint_trace_rejected_in_2d(self):
        with pytest.raises(StructuralError):
            MeshSpec(2, (1.0, 1.0), (4, 4), BoundarySpec.endpoints(0, 1))

    def test_grid_measure(self):
        mesh = mesh_2d((4, 5))
        assert mesh.grid().total_measure == pytest.approx(1.0, rel=1e-12)


class TestGradient:
    def test_affine_exact_1d(self):
        mesh = mesh_1d(37, g0=0.25, g1=2.0)
        u = interpolate_boundary(mesh)
        g = gradient(u)
        assert np.allclose(g.values, 1.75, rtol=0, atol=1e-13)

    def test_quadratic_midpoint_identity(self):
        # (x_{i+1}^2 - x_i^2)/h = x_i + x_{i+1} = 2 * midpoint
        mesh = mesh_1d(100)
        x = np.linspace(0.0, 1.0, 101)
        u = DiscreteField(mesh, x * x)
        g = gradient(u)
        centers = mesh.grid().cells[:, 0]
        assert np.allclose(g.values, 2.0 * centers, rtol=0, atol=1e-13)

    def test_affine_exact_2d(self):
        mesh = mesh_2d((6, 9), BoundarySpec.affine(0.5, 1.0, 2.0))
        u = interpolate_boundary(mesh)
        g = gradient(u)
        assert np.allclose(g.values[:, 0], 1.0, atol=1e-12)
        assert np.allclose(g.values[:, 1], 2.0, atol=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(1)
        mesh = mesh_2d((5, 7))
        u = DiscreteField(mesh, rng.normal(size=mesh.node_shape))
        v = DiscreteField(mesh, rng.normal(size=mesh.node_shape))
        a, b = 2.5, -1.25
        combo = DiscreteField(mesh, a * u.node_values + b * v.node_values)
        lhs = gradient(combo).values
        rhs = a * gradient(u).values + b * gradient(v).values
        assert np.array_equal(lhs, rhs) or np.allclose(lhs, rhs, atol=1e-14)


class TestInterpolateBoundary:
    def test_identity_trace(self):
        mesh = mesh_1d(10, 0.0, 1.0)
        u = interpolate_boundary(mesh)
        assert np.allclose(u.node_values, np.linspace(0, 1, 11), atol=1e-15)

    def test_zero_trace(self):
        mesh = mesh_1d(10, 0.0, 0.0)
        assert np.allclose(interpolate_boundary(mesh).node_values, 0.0)

    def test_affine_trace_2d_reproduced(self):
        mesh = mesh_2d((7, 5), BoundarySpec.affine(0.0, 1.0, 0.0))
        u = interpolate_boundary(mesh)
        X = np.linspace(0, 1, 8)[:, None] * np.ones((1, 6))
        assert np.allclose(u.node_values, X, atol=1e-14)

    def test_affine_trace_supremal_is_slope(self):
        mesh = mesh_2d((6, 6), BoundarySpec.affine(0.0, 3.0, 4.0))
        u = interpolate_boundary(mesh)
        f = DensitySpec.weighted_norm(mesh.grid(), 1.0)
        assert eval_supremal(f, u.cell_values(), gradient(u)) == pytest.approx(5.0, rel=1e-12)


class TestDiscreteField:
    def test_boundary_survives_interior_updates(self):
        mesh = mesh_2d((4, 4))
        u = interpolate_boundary(mesh)
        before = np.array(u.node_values)
        v = u.with_interior(np.full(9, 42.0))
        assert v.node_values[0, 0] == before[0, 0]
        assert np.array_equal(v.node_values[0, :], before[0, :])
        assert np.array_equal(v.node_values[:, -1], before[:, -1])
        assert np.all(v.node_values[1:-1, 1:-1] == 42.0)
        # original untouched
        assert np.array_equal(u.node_values, before)

    def test_cell_values_average_corners(self):
        mesh = mesh_1d(4, 0.0, 1.0)
        u = interpolate_boundary(mesh)
        assert np.allclose(u.cell_values().values, mesh.grid().cells[:, 0], atol=1e-15)

    def test_shape_mismatch(self):
        mesh = mesh_1d(4)
        with pytest.raises(StructuralError):
            DiscreteField(mesh, np.zeros(3))
