"""Shared scenes and (expensive) solver fixtures.

Session-scoped fixtures cache the unit-square forward solve and its
boundary-circle trace so the indicator/fit tests do not re-solve the
same system dozens of times.
"""

import numpy as np
import pytest

from enclosure2d.fields import PlaneWave, PointSource
from enclosure2d.forward import build_mesh, solve_scattering
from enclosure2d.geometry import Direction, Polygon, Scene
from enclosure2d.trace import trace_direct

SQUARE_VERTS = np.array([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])
TRIANGLE_VERTS = np.array(
    [[0.5, -np.sqrt(3) / 6], [0.0, np.sqrt(3) / 3], [-0.5, -np.sqrt(3) / 6]]
)
# L-shaped hexagon (nonconvex), contained in the unit square
L_VERTS = np.array(
    [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.0], [0.0, 0.0], [0.0, 0.5], [-0.5, 0.5]]
)


def make_scene(verts):
    obstacles = () if verts is None else (Polygon(np.asarray(verts, dtype=float)),)
    return Scene(
        obstacles=obstacles,
        radius_R=2.0,
        radius_R1=6.0,
        source_y=(6.0, 0.0),
        wavenumber_k=2.0,
    )


@pytest.fixture(scope="session")
def square_scene():
    return make_scene(SQUARE_VERTS)


@pytest.fixture(scope="session")
def empty_scene():
    return make_scene(None)


@pytest.fixture(scope="session")
def taus():
    return np.geomspace(8.0, 40.0, 16)


@pytest.fixture(scope="session")
def square_sol(square_scene):
    mesh = build_mesh(square_scene, nodes_per_edge=64)
    return solve_scattering(square_scene, PointSource(square_scene.source_y), mesh)


@pytest.fixture(scope="session")
def square_trace(square_sol, square_scene):
    return trace_direct(square_sol, square_scene.radius_R, 512)


@pytest.fixture(scope="session")
def square_trace_pw(square_scene):
    mesh = build_mesh(square_scene, nodes_per_edge=64)
    sol = solve_scattering(square_scene, PlaneWave(Direction.from_angle(0.7)), mesh)
    return trace_direct(sol, square_scene.radius_R, 512)
