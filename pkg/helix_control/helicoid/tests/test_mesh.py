import io
import math

import numpy as np
from django.test import SimpleTestCase

from helicoid.exceptions import InvalidInput
from helicoid.lines import HelicoidalFrame
from helicoid.mesh import grid_triangles, read_obj, sweep_mesh, triangle_areas, write_obj
from helicoid.planner import HelicoidalPiece
from helicoid.spaceform import Curvature, metric_inner


class GridTrianglesTests(SimpleTestCase):
    def test_two_triangles_per_cell(self):
        triangles = grid_triangles(3, 4)
        self.assertEqual(triangles.shape, (2 * 2 * 3, 3))
        np.testing.assert_array_equal(triangles[:2], [[0, 4, 5], [0, 5, 1]])
        self.assertEqual(triangles.max(), 11)

    def test_winding_is_counter_clockwise_in_the_parameter_plane(self):
        s, t = np.meshgrid(np.arange(3.0), np.arange(4.0), indexing='ij')
        plane = np.column_stack([s.ravel(), t.ravel()])
        for a, b, c in grid_triangles(3, 4):
            u, v = plane[b] - plane[a], plane[c] - plane[a]
            self.assertGreater(u[0] * v[1] - u[1] * v[0], 0.0)


class SweepMeshTests(SimpleTestCase):
    def test_standard_flat_helicoid_vertices(self):
        piece = HelicoidalPiece(HelicoidalFrame.standard(Curvature.FLAT, 1.0), 2.0)
        mesh = sweep_mesh(piece, (5, 4), 1.0)
        s_values, t_values = np.linspace(-1.0, 1.0, 5), np.linspace(0.0, 2.0, 4)
        for i, s in enumerate(s_values):
            for j, t in enumerate(t_values):
                expected = [1.0, s * math.cos(t), s * math.sin(t), t]
                np.testing.assert_allclose(mesh.vertices[i * 4 + j], expected, atol=1e-12)
        self.assertTrue(np.all(triangle_areas(mesh) > 0))

    def test_sphere_vertices_stay_on_the_sphere(self):
        piece = HelicoidalPiece(HelicoidalFrame.standard(Curvature.SPHERICAL, 0.5), 3.0)
        mesh = sweep_mesh(piece, (6, 7), 1.5)
        for vertex in mesh.vertices:
            self.assertAlmostEqual(metric_inner(1, vertex, vertex), 1.0, places=10)

    def test_degenerate_grids_are_rejected(self):
        piece = HelicoidalPiece(HelicoidalFrame.standard(Curvature.FLAT, 1.0), 1.0)
        with self.assertRaises(InvalidInput):
            sweep_mesh(piece, (1, 5), 1.0)
        with self.assertRaises(InvalidInput):
            sweep_mesh(piece, (5, 5), 0.0)


class ObjFormatTests(SimpleTestCase):
    def test_written_text_reads_back(self):
        piece = HelicoidalPiece(HelicoidalFrame.standard(Curvature.HYPERBOLIC, 2.0), 1.0)
        mesh = sweep_mesh(piece, (3, 3), 0.5)
        stream = io.StringIO()
        write_obj(mesh, stream, comment='hyperbolic')
        text = stream.getvalue()
        self.assertTrue(text.startswith('# hyperbolic\n'))
        self.assertIn('\nf 1 4 5\n', text)
        again = read_obj(text)
        np.testing.assert_array_equal(again.vertices, mesh.vertices)
        np.testing.assert_array_equal(again.triangles, mesh.triangles)

    def test_homogeneous_coordinate_comes_last(self):
        self.assertEqual(read_obj('v 1 2 3 1\n').vertices.tolist(), [[1.0, 1.0, 2.0, 3.0]])

    def test_malformed_record(self):
        with self.assertRaises(InvalidInput):
            read_obj('v 1 two 3 1\n')
