"""Far-field patterns, operator structure, and the unsolvability diagnostic."""

import numpy as np
import pytest

from enclosure2d.errors import DomainError
from enclosure2d.farfield import (
    assemble_far_field_operator,
    disc_far_field_operator,
    far_field_constant,
    far_field_pattern,
    lsm_indicator_map,
    point_source_far_field_check,
    solve_far_field_equation,
    unsolvability_diagnostic,
)
from enclosure2d.fields import PlaneWave
from enclosure2d.forward import DiscSeriesSolution, build_mesh, solve_scattering
from enclosure2d.geometry import Direction, Polygon, Scene

from conftest import make_scene, SQUARE_VERTS

DISC_R = 0.8
K = 2.0


def disc_scene(n_gon=64):
    ang = 2 * np.pi * np.arange(n_gon) / n_gon + np.pi / n_gon
    gon = Polygon(np.column_stack([DISC_R * np.cos(ang), DISC_R * np.sin(ang)]))
    return Scene(
        obstacles=(gon,),
        radius_R=2.0,
        radius_R1=6.0,
        source_y=(6.0, 0.0),
        wavenumber_k=K,
    )


@pytest.fixture(scope="module")
def disc_op():
    return disc_far_field_operator(DISC_R, K, 64, 64)


@pytest.fixture(scope="module")
def square_op():
    return assemble_far_field_operator(make_scene(SQUARE_VERTS), 32, 32, nodes_per_edge=32)


class TestPattern:
    def test_constant(self):
        c = far_field_constant(K)
        assert abs(c) == pytest.approx(1.0 / np.sqrt(8 * np.pi * K), rel=1e-14)
        assert np.angle(c) == pytest.approx(np.pi / 4, abs=1e-14)

    def test_empty_scene_zero_pattern(self, empty_scene):
        mesh = build_mesh(empty_scene)
        sol = solve_scattering(empty_scene, PlaneWave(Direction.from_angle(0.0)), mesh)
        ff = far_field_pattern(sol, np.linspace(0, 2 * np.pi, 8, endpoint=False))
        assert np.all(ff == 0)

    def test_disc_polygon_vs_series(self):
        scene = disc_scene()
        inc = PlaneWave(Direction.from_angle(0.3))
        sol = solve_scattering(scene, inc, build_mesh(scene, nodes_per_edge=16))
        obs = np.linspace(0, 2 * np.pi, 16, endpoint=False)
        ff = far_field_pattern(sol, obs)
        ff_ref = DiscSeriesSolution((0.0, 0.0), DISC_R, K, inc).far_field(obs)
        assert np.max(np.abs(ff - ff_ref)) < 1e-2 * np.max(np.abs(ff_ref))


class TestPointSourceRelation:
    def test_small_discrepancy(self, square_scene):
        angles = np.linspace(0, 2 * np.pi, 6, endpoint=False)
        assert point_source_far_field_check(square_scene, angles, nodes_per_edge=64) < 1e-3

    def test_decreases_under_refinement(self, square_scene):
        angles = np.linspace(0, 2 * np.pi, 4, endpoint=False)
        coarse = point_source_far_field_check(square_scene, angles, nodes_per_edge=32)
        fine = point_source_far_field_check(square_scene, angles, nodes_per_edge=64)
        assert fine < coarse


class TestOperator:
    def test_empty_scene_zero_operator(self, empty_scene):
        op = assemble_far_field_operator(empty_scene, 16, 16)
        assert np.all(op.matrix == 0)

    def test_reciprocity(self, square_op):
        scale = float(np.max(np.abs(square_op.matrix)))
        assert square_op.reciprocity_defect() < 1e-4 * scale

    def test_reciprocity_needs_matching_grids(self, empty_scene):
        op = assemble_far_field_operator(empty_scene, 16, 8)
        with pytest.raises(DomainError):
            op.reciprocity_defect()

    def test_disc_operator_is_circulant(self, disc_op):
        # rotation invariance makes Fourier modes eigenvectors
        for n in (0, 3):
            g = np.exp(1j * n * disc_op.inc_angles)
            out = disc_op.apply(g)
            lam = out[0] / g[0]
            ref = lam * np.exp(1j * n * disc_op.obs_angles)
            assert np.max(np.abs(out - ref)) < 1e-12 * np.max(np.abs(out))


class TestRegularizedSolve:
    def test_alpha_must_be_positive(self, disc_op):
        with pytest.raises(DomainError):
            solve_far_field_equation(disc_op, (0.0, 0.0), 0.0)

    def test_norm_monotone_in_alpha(self, disc_op):
        norms = [
            solve_far_field_equation(disc_op, (0.3, 0.1), alpha)[1]
            for alpha in (1e-2, 1e-4, 1e-6)
        ]
        assert norms[0] <= norms[1] <= norms[2]

    def test_alpha_sweep_validation(self, disc_op):
        with pytest.raises(DomainError):
            unsolvability_diagnostic(disc_op, (0, 0), np.logspace(-8, -2, 13))
        with pytest.raises(DomainError):
            unsolvability_diagnostic(disc_op, (0, 0), np.logspace(-2, -4, 6))

    def test_disc_center_plateaus(self, disc_op):
        rep = unsolvability_diagnostic(disc_op, (0.0, 0.0), np.logspace(-2, -8, 13))
        assert not rep.no_plateau
        assert np.max(rep.norms) / np.min(rep.norms) < 1.5

    def test_square_exterior_blows_up(self, square_op):
        rep = unsolvability_diagnostic(square_op, (1.5, 0.3), np.logspace(-2, -8, 13))
        assert rep.no_plateau
        assert rep.norms[-1] > 10 * rep.norms[0]


class TestLsmMap:
    def test_disc_contrast(self, disc_op):
        interior = np.array([[0.0, 0.0], [0.2, 0.1], [-0.3, 0.2], [0.1, -0.35]])
        th = np.linspace(0, 2 * np.pi, 12, endpoint=False)
        ring = 1.5 * np.column_stack([np.cos(th), np.sin(th)])
        mi = lsm_indicator_map(disc_op, interior)
        mo = lsm_indicator_map(disc_op, ring)
        assert np.min(mi) > 10 * np.max(mo)

    def test_peak_near_center(self, disc_op):
        xs = np.linspace(-1.2, 1.2, 13)
        grid = np.array([[x, y] for x in xs for y in xs])
        vals = lsm_indicator_map(disc_op, grid)
        peak = grid[np.argmax(vals)]
        assert np.linalg.norm(peak) < 0.2
