import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lvlmg.grid import (
    AxisSpec, CoarsestLevelReached, ConfigurationError, EcsLayer, build_grid, coarsen_grid,
)

from conftest import dirichlet_grid, ecs_grid


def test_uniform_dirichlet_1d():
    g = dirichlet_grid(8)
    assert g.shape == (7,)
    np.testing.assert_allclose(g.spacings[0], 1 / 8)
    assert g.boundary_kinds == [("dirichlet", "dirichlet")]
    assert g.is_uniform_dirichlet


def test_ecs_all_faces_node_count():
    g = ecs_grid(32, dim=2)
    for ax in g.axes:
        assert ax.intervals == 32 + 2 * 8
        assert ax.interior_points == 32
    assert g.boundary_kinds == [("ecs", "ecs")] * 2


def test_single_high_layer_coordinates():
    g = build_grid([AxisSpec(4, 1.0, ecs_high=EcsLayer(1, np.pi / 6))])
    ax = g.axes[0]
    np.testing.assert_allclose(ax.spacings[-1], 0.25 * np.exp(1j * np.pi / 6), atol=1e-15)
    # the layer is appended after the physical boundary at x = 1
    np.testing.assert_allclose(ax.nodes[-1], 1.0 + 0.25 * np.exp(1j * np.pi / 6), atol=1e-15)
    np.testing.assert_allclose(ax.unknown_nodes[-1], 1.0)
    assert g.shape == (4,)


def test_spacing_invariants():
    g = ecs_grid(16, dim=2, angle=0.4)
    for ax in g.axes:
        inner = ax.spacings[ax.labels == 0]
        outer = ax.spacings[ax.labels != 0]
        np.testing.assert_allclose(inner, 1 / 16)
        np.testing.assert_allclose(outer, np.exp(0.4j) / 16)
        np.testing.assert_allclose(np.diff(ax.nodes), ax.spacings, rtol=1e-14)
        # the physical interior starts at the origin of the real axis
        np.testing.assert_allclose(ax.nodes[4], 0.0, atol=1e-15)


@pytest.mark.parametrize("n", [0, 3, 6, 12])
def test_rejects_non_power_of_two(n):
    with pytest.raises(ConfigurationError):
        build_grid([AxisSpec(n)])


def test_rejects_wrong_quarter_layer():
    spec = AxisSpec(16, 1.0, ecs_low=EcsLayer(2), require_quarter_layers=True)
    with pytest.raises(ConfigurationError):
        build_grid([spec])


@pytest.mark.parametrize("points,angle", [(0, 0.5), (2, 0.0), (2, np.pi / 2)])
def test_ecs_layer_validation(points, angle):
    with pytest.raises(ConfigurationError):
        EcsLayer(points, angle)


def test_coarsen_uniform():
    g = coarsen_grid(dirichlet_grid(8))
    assert g.shape == (3,)
    np.testing.assert_allclose(g.spacings[0], 1 / 4)
    assert g.level == 1


def test_coarsen_ecs_2d():
    g = coarsen_grid(ecs_grid(32, dim=2))
    for ax in g.axes:
        assert ax.interior_points == 16
        assert np.count_nonzero(ax.labels == 1) == 4
        assert np.count_nonzero(ax.labels == 2) == 4


def test_coarsest_reached():
    for g in (build_grid([AxisSpec(2, 1.0, ecs_high=EcsLayer(1))]), dirichlet_grid(2)):
        assert not g.coarsenable()
        with pytest.raises(CoarsestLevelReached):
            coarsen_grid(g)


@settings(max_examples=30, deadline=None)
@given(p=st.integers(2, 8), angle=st.floats(0.05, 1.5), ecs=st.booleans())
def test_coarsening_preserves_length_and_realness(p, angle, ecs):
    n = 2 ** p
    spec = AxisSpec.with_ecs(n, 2.5, angle=angle) if ecs else AxisSpec(n, 2.5)
    g = build_grid([spec])
    total = g.axes[0].nodes[-1] - g.axes[0].nodes[0]
    levels = 1
    while g.coarsenable():
        g = coarsen_grid(g)
        levels += 1
        ax = g.axes[0]
        np.testing.assert_allclose(ax.nodes[-1] - ax.nodes[0], total, rtol=1e-13)
        assert np.all(ax.spacings[ax.labels == 0].imag == 0)
        assert np.all(ax.spacings[ax.labels == 0].real > 0)
    if not ecs:
        assert levels == p
        assert g.axes[0].interior_points == 2
