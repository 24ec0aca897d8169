import math
import unittest

import numpy as np
import shapely
from hypothesis import given, settings, strategies as st

from cutfsci.core.cutcell import (CUT, FLUID, SIDE_DRY, SIDE_FS, SIDE_SC, VOID, ResolvedInterface, build_cut_state,
                                  build_volume_quadrature, candidate_fluid_region, classify_elements, dry_cut_state,
                                  interface_quadrature, remove_islands, select_ghost_faces, volume_quadrature)
from cutfsci.core.generator import RectangleMeshGenerator, parse_edge_tags
from cutfsci.core.mesh import build_structured_grid, extract_interface, merge_solid_meshes
from cutfsci.exception import GeometryError

ALL_COUPLING = "bottom=coupling, right=coupling, top=coupling, left=coupling"


def circle_polygon(center, radius, n_vertices):
    angles = 2.0 * math.pi * np.arange(n_vertices) / n_vertices
    return shapely.Polygon(np.column_stack([center[0] + radius * np.cos(angles),
                                            center[1] + radius * np.sin(angles)]))


def block(x_range, y_range, nx, ny, tags, body):
    return RectangleMeshGenerator(x_range=x_range, y_range=y_range, nx=nx, ny=ny,
                                  edge_tags=parse_edge_tags(tags)).generate(body)


def empty_resolved():
    empty = np.zeros((0, 2))
    return ResolvedInterface(empty, empty, np.zeros(0, dtype=int), np.zeros(0), np.zeros(0),
                             np.zeros(0, dtype=object), np.zeros(0, dtype=bool))


class TestPolygonQuadrature(unittest.TestCase):

    @settings(max_examples=40, deadline=None)
    @given(x0=st.floats(-1.0, 1.0), y0=st.floats(-1.0, 1.0),
           width=st.floats(0.05, 1.0), height=st.floats(0.05, 1.0))
    def test_rectangles_exact_to_degree_four(self, x0, y0, width, height):
        x1, y1 = x0 + width, y0 + height
        polygon = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
        points, weights = volume_quadrature(polygon, 4)
        for a in range(5):
            for b in range(5 - a):
                exact = (x1 ** (a + 1) - x0 ** (a + 1)) / (a + 1) * (y1 ** (b + 1) - y0 ** (b + 1)) / (b + 1)
                value = np.dot(weights, points[:, 0] ** a * points[:, 1] ** b)
                self.assertAlmostEqual(value, exact, delta=1e-10 * max(1.0, abs(exact)))

    def test_non_convex_polygon_is_ear_clipped(self):
        l_shape = np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], dtype=float)
        points, weights = volume_quadrature(l_shape, 2)
        self.assertAlmostEqual(weights.sum(), 3.0)
        self.assertAlmostEqual(np.dot(weights, points[:, 0]), 2.5)
        inside = shapely.contains_xy(shapely.Polygon(l_shape), points[:, 0], points[:, 1])
        self.assertTrue(np.all(inside))

    def test_interface_quadrature(self):
        points, weights, params, owners = interface_quadrature([[0.0, 0.0], [1.0, 1.0]],
                                                               [[2.0, 0.0], [1.0, 1.0]], 3)
        self.assertAlmostEqual(weights.sum(), 2.0)
        np.testing.assert_array_equal(owners, 0)
        self.assertAlmostEqual(np.dot(weights, points[:, 0] ** 3), 4.0)
        _, more, _, _ = interface_quadrature([[0.0, 0.0]], [[1.0, 0.0]], 3, multipliers=[3])
        self.assertEqual(len(more), 6)


class TestClassification(unittest.TestCase):

    def setUp(self):
        self.grid = build_structured_grid((0.0, 0.0), (1.0, 1.0), 4, 4)

    def test_aligned_hole(self):
        region = candidate_fluid_region(self.grid, {1: shapely.box(0.25, 0.25, 0.75, 0.75)})
        classification = classify_elements(self.grid, region)
        self.assertEqual(np.sum(classification.labels == VOID), 4)
        self.assertEqual(np.sum(classification.labels == FLUID), 12)
        self.assertEqual(np.sum(classification.active_nodes), 24)
        self.assertFalse(classification.active_nodes[self.grid.node_id(2, 2)])
        self.assertEqual(len(select_ghost_faces(self.grid, classification.labels)), 0)

    def test_cut_hole(self):
        region = candidate_fluid_region(self.grid, {1: shapely.box(0.3, 0.3, 0.7, 0.7)})
        classification = classify_elements(self.grid, region)
        middle = [self.grid.element_id(i, j) for i in (1, 2) for j in (1, 2)]
        np.testing.assert_array_equal(classification.labels[middle], CUT)
        self.assertAlmostEqual(classification.areas[middle[0]], 0.0625 - 0.04)
        self.assertTrue(np.all(classification.active_nodes))
        self.assertEqual(len(select_ghost_faces(self.grid, classification.labels)), 12)
        volume = build_volume_quadrature(self.grid, classification, 4)
        self.assertAlmostEqual(volume.weights.sum(), 1.0 - 0.16, places=12)
        self.assertTrue(np.all(np.diff(volume.elements) >= 0))

    def test_interface_along_an_edge_within_tolerance(self):
        region = candidate_fluid_region(self.grid, {1: shapely.box(0.3, 0.3, 0.7, 0.75 - 1e-8)})
        with self.assertRaises(GeometryError) as ctx:
            classify_elements(self.grid, region, tol=1e-6)
        self.assertEqual(ctx.exception.element, self.grid.element_id(1, 2))
        labels = classify_elements(self.grid, region).labels
        self.assertEqual(labels[self.grid.element_id(1, 2)], CUT)

    def test_crossing_edges_is_not_ambiguous(self):
        region = candidate_fluid_region(self.grid, {1: shapely.box(0.3, 0.3, 0.7, 0.7)})
        labels = classify_elements(self.grid, region, tol=1e-6).labels
        self.assertEqual(np.sum(labels == CUT), 4)

    def test_retained_elements_get_ghost_faces(self):
        region = candidate_fluid_region(self.grid, {1: shapely.box(0.25, 0.25, 0.75, 0.75)})
        labels = classify_elements(self.grid, region).labels
        retained = np.zeros(self.grid.n_elements, dtype=bool)
        retained[self.grid.element_id(1, 1)] = True
        self.assertEqual(len(select_ghost_faces(self.grid, labels, retained)), 2)

    def test_circle_area_converges_with_resolution(self):
        errors = []
        radius = 0.37
        for n in (20, 40):
            grid = build_structured_grid((0.0, 0.0), (1.0, 1.0), n, n)
            region = candidate_fluid_region(grid, {1: circle_polygon((0.5, 0.5), radius, 4 * n)})
            volume = build_volume_quadrature(grid, classify_elements(grid, region), 4)
            self.assertAlmostEqual(volume.weights.sum(), region.area, delta=1e-10)
            errors.append(abs(volume.weights.sum() - (1.0 - math.pi * radius ** 2)))
        self.assertGreaterEqual(errors[0] / errors[1], 3.5)

    def test_small_pockets_are_removed(self):
        grid = build_structured_grid((0.0, 0.0), (1.0, 1.0), 10, 10)
        frame = shapely.Polygon([(0.2, 0.2), (0.8, 0.2), (0.8, 0.8), (0.2, 0.8)],
                                [[(0.45, 0.45), (0.45, 0.55), (0.55, 0.55), (0.55, 0.45)]])
        region = candidate_fluid_region(grid, {1: frame})
        fluid, resolved = remove_islands(region, empty_resolved(), None, grid, [1], 2.0, 1e-12)
        self.assertEqual(len(resolved.islands), 1)
        self.assertAlmostEqual(fluid.area, 1.0 - 0.36)


class TestCutState(unittest.TestCase):

    def test_single_body(self):
        grid = build_structured_grid((0.0, 0.0), (1.0, 1.0), 6, 6)
        mesh = block((0.32, 0.61), (0.27, 0.58), 2, 2, ALL_COUPLING, 1)
        u = np.zeros((mesh.n_nodes, 2))
        interface = extract_interface(mesh, u)
        cut = build_cut_state(grid, mesh, u, interface, [1])
        self.assertTrue(np.all(cut.resolved.sides == SIDE_FS))
        lengths = np.linalg.norm(cut.resolved.end - cut.resolved.start, axis=1)
        self.assertAlmostEqual(lengths.sum(), 2.0 * (0.29 + 0.31))
        self.assertTrue(np.all(cut.sub_elements >= 0))
        np.testing.assert_array_equal(cut.labels[cut.sub_elements], CUT)
        self.assertAlmostEqual(cut.volume.weights.sum(), 1.0 - 0.29 * 0.31, places=12)
        self.assertGreater(len(cut.ghost_faces), 0)
        portions = cut.boundary_portions['left']
        self.assertAlmostEqual(np.linalg.norm(portions[2] - portions[1], axis=1).sum(), 1.0)

    def test_overlapping_bodies_are_in_contact(self):
        grid = build_structured_grid((0.0, 0.0), (1.0, 1.0), 5, 5)
        base = block((-0.2, 1.2), (-0.5, 0.31), 4, 2, "top=coupling", 1)
        stamp = block((0.35, 0.65), (0.3, 0.7), 2, 2, ALL_COUPLING, 2)
        mesh = merge_solid_meshes([('base', base), ('stamp', stamp)])
        u = np.zeros((mesh.n_nodes, 2))
        interface = extract_interface(mesh, u)
        cut = build_cut_state(grid, mesh, u, interface, [1, 2])
        mids = 0.5 * (cut.resolved.start + cut.resolved.end)
        contact = cut.resolved.sides == SIDE_SC
        self.assertTrue(np.any(contact))
        self.assertTrue(np.all(np.abs(mids[contact, 1] - 0.305) < 0.01))
        self.assertTrue(np.all((mids[contact, 0] > 0.35 - 1e-12) & (mids[contact, 0] < 0.65 + 1e-12)))
        base_top_outside = (~contact) & (np.abs(mids[:, 1] - 0.31) < 1e-12) & (mids[:, 0] > 0.0) \
            & (mids[:, 0] < 1.0)
        self.assertTrue(np.all(cut.resolved.sides[base_top_outside] == SIDE_FS))
        outside_grid = (mids[:, 0] < 0.0) | (mids[:, 0] > 1.0)
        self.assertTrue(np.all(cut.resolved.sides[outside_grid] == SIDE_DRY))

    def test_dry_cut_state(self):
        mesh = block((0.0, 1.0), (0.0, 1.0), 2, 2, "bottom=coupling", 1)
        interface = extract_interface(mesh, np.zeros((mesh.n_nodes, 2)))
        cut = dry_cut_state(interface)
        self.assertEqual(cut.h, 0.5)
        self.assertTrue(np.all(cut.resolved.sides == SIDE_DRY))
        np.testing.assert_array_equal(cut.sub_elements, -1)


if __name__ == '__main__':
    unittest.main()
