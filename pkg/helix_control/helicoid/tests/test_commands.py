import json
import math
import os
import tempfile
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from helicoid.lines import HelicoidalFrame, euclidean_line, reverse
from helicoid.mesh import read_obj
from helicoid.planner import HelicoidalPiece
from helicoid.quatsphere import phi_inverse
from helicoid.serializers import HelicoidalPieceSerializer, OrientedGeodesicSerializer
from helicoid.spaceform import metric_inner

X_AXIS = euclidean_line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])


def geodesic(line):
    return OrientedGeodesicSerializer(line).data


def run(name, document=None, *args, **options):
    """Run a command with document on stdin; returns the raw stdout text"""
    out = StringIO()
    stdin = StringIO(document if isinstance(document, str) else json.dumps(document))
    call_command(name, *args, stdin=stdin, stdout=out, stderr=StringIO(), **options)
    return out.getvalue()


class PlanCommandTests(SimpleTestCase):
    def test_equal_lines_give_an_empty_plan(self):
        result = json.loads(run('plan', {'source': geodesic(X_AXIS), 'target': geodesic(X_AXIS)}))
        self.assertEqual(result['pieces'], [])
        self.assertEqual(result['schema_version'], 1)

    def test_reverse_pair(self):
        pair = {'source': geodesic(X_AXIS), 'target': geodesic(reverse(X_AXIS))}
        helicoidal = json.loads(run('plan', pair, alpha=1.0))
        screw = json.loads(run('plan_screw', pair, alpha=1.0))
        self.assertEqual(len(helicoidal['pieces']), 3)
        self.assertEqual(len(screw['pieces']), 2)
        self.assertLessEqual(helicoidal['endpoint_residual'], 1e-7)
        self.assertLessEqual(screw['endpoint_residual'], 1e-7)

    def test_output_is_deterministic(self):
        pair = {'source': geodesic(X_AXIS), 'target': geodesic(euclidean_line([0.0, 1.0, 2.0], [0.0, 1.0, 0.0]))}
        self.assertEqual(run('plan', pair, alpha=0.7), run('plan', pair, alpha=0.7))

    def test_batch_of_pairs(self):
        pair = {'source': geodesic(X_AXIS), 'target': geodesic(reverse(X_AXIS))}
        serial = run('plan', [pair, pair], alpha=2.0)
        self.assertEqual(serial, run('plan', [pair, pair], alpha=2.0, parallel=True))
        self.assertEqual(len(json.loads(serial)), 2)

    def test_malformed_json(self):
        with self.assertRaises(CommandError) as caught:
            run('plan', '{"source": ')
        self.assertEqual(caught.exception.returncode, 1)

    def test_validation_errors_name_the_field(self):
        bad = geodesic(X_AXIS)
        bad['kappa'] = 7
        with self.assertRaises(CommandError) as caught:
            run('plan', {'source': bad, 'target': geodesic(X_AXIS)})
        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn('source.kappa', str(caught.exception))

    def test_zero_alpha_cannot_reverse(self):
        with self.assertRaises(CommandError) as caught:
            run('plan', {'source': geodesic(X_AXIS), 'target': geodesic(reverse(X_AXIS))}, alpha=0.0)
        self.assertEqual(caught.exception.returncode, 1)

    def test_config_file_and_flags(self):
        pair = {'source': geodesic(X_AXIS), 'target': geodesic(reverse(X_AXIS))}
        with tempfile.TemporaryDirectory() as tmp:
            config = os.path.join(tmp, 'run.json')
            with open(config, 'w') as handle:
                json.dump({'alpha': 2.0, 'tol': 1e-6}, handle)
            self.assertEqual(json.loads(run('plan', pair, config=config))['alpha'], 2.0)
            self.assertEqual(json.loads(run('plan', pair, config=config, alpha=0.5))['alpha'], 0.5)

    def test_out_file(self):
        pair = {'source': geodesic(X_AXIS), 'target': geodesic(X_AXIS)}
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'plan.json')
            self.assertEqual(run('plan', pair, out=path), '')
            with open(path) as handle:
                self.assertEqual(json.load(handle)['pieces'], [])

    def test_missing_input_file(self):
        with self.assertRaises(CommandError) as caught:
            run('plan', None, '/nonexistent/pair.json')
        self.assertEqual(caught.exception.returncode, 1)


class CheckAdmissibleCommandTests(SimpleTestCase):
    def test_circular_helicoid(self):
        result = json.loads(run('check_admissible', {'kind': 'circular', 'alpha': 2.0, 'r': 0.5}))
        self.assertFalse(result['admissible'])
        self.assertAlmostEqual(result['speed'], math.hypot(2.0, 2.0))

    def test_batch_of_checks(self):
        checks = [
            {'kind': 'ruled', 'alpha': 1.0, 'beta_dot': [0, 0, 1], 'ruling': [1, 0, 0], 'ruling_dot': [0, 1, 0]},
            {'kind': 'ruled', 'alpha': 2.0, 'beta_dot': [0, 0, 1], 'ruling': [1, 0, 0], 'ruling_dot': [0, 1, 0]},
        ]
        result = json.loads(run('check_admissible', checks))
        self.assertEqual([r['admissible'] for r in result], [True, False])

    def test_jacobi_check(self):
        check = {
            'kind': 'jacobi', 'alpha': 1.0, 'kappa': 1,
            'point': [1, 0, 0, 0], 'direction': [0, 1, 0, 0], 'u': [0, 0, 0, 1], 'v': [0, 0, 1, 0],
        }
        result = json.loads(run('check_admissible', check))
        self.assertTrue(result['admissible'])

    def test_non_standard_ruling(self):
        check = {'kind': 'ruled', 'alpha': 1.0, 'beta_dot': [1, 0, 0], 'ruling': [0, 1, 0], 'ruling_dot': [1, 0, 0]}
        with self.assertRaises(CommandError) as caught:
            run('check_admissible', check)
        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn('non_standard_ruling', str(caught.exception))


class ClassifySphereCommandTests(SimpleTestCase):
    def test_left_fibers(self):
        circles = [geodesic(phi_inverse([1.0, 0.0, 0.0], y)) for y in ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0])]
        result = json.loads(run('classify_sphere', circles))
        self.assertEqual(result['count'], 2)
        self.assertEqual(result['kind'], 'left-hopf')
        self.assertIsNone(result['right'])

    def test_repeated_circle_is_in_both_fibrations(self):
        circle = {'kappa': 1, 'base': [1, 0, 0, 0], 'dir': [0, 1, 0, 0]}
        self.assertEqual(json.loads(run('classify_sphere', [circle, circle]))['kind'], 'both')

    def test_empty_family(self):
        with self.assertRaises(CommandError) as caught:
            run('classify_sphere', [])
        self.assertEqual(caught.exception.returncode, 1)

    def test_images_are_reported(self):
        circle = {'kappa': 1, 'base': [1, 0, 0, 0], 'dir': [0, 1, 0, 0]}
        result = json.loads(run('classify_sphere', [circle]))
        self.assertEqual(result['images'], [{'x': [1.0, 0.0, 0.0], 'y': [1.0, 0.0, 0.0]}])

    def test_images_as_input(self):
        images = [{'x': [0.0, 0.0, 1.0], 'y': [1.0, 0.0, 0.0]}, {'x': [0.0, 1.0, 0.0], 'y': [1.0, 0.0, 0.0]}]
        result = json.loads(run('classify_sphere', images, images=True))
        self.assertEqual(result['kind'], 'right-hopf')
        self.assertEqual(result['count'], 2)
        for got, expected in zip(result['images'], images):
            for name in ('x', 'y'):
                self.assertTrue(all(math.isclose(a, b, abs_tol=1e-12) for a, b in zip(got[name], expected[name])))

    def test_non_unit_image_is_rejected(self):
        with self.assertRaises(CommandError) as caught:
            run('classify_sphere', [{'x': [2.0, 0.0, 0.0], 'y': [1.0, 0.0, 0.0]}], images=True)
        self.assertEqual(caught.exception.returncode, 1)


class RankCommandTests(SimpleTestCase):
    def test_flat_ranks(self):
        result = json.loads(run('rank', kappa=0, alphas=[-1.0, -0.5, 0.0, 0.5, 1.0]))
        self.assertEqual([row['rank'] == 4 for row in result['ranks']], [True, True, False, True, True])
        self.assertEqual(result['uncontrollable'], [0.0])

    def test_sphere_adds_the_critical_alphas(self):
        result = json.loads(run('rank', kappa=1, alphas=[0.5]))
        self.assertEqual([row['alpha'] for row in result['ranks']], [-1.0, 0.5, 1.0])
        self.assertEqual(result['uncontrollable'], [-1.0, 1.0])
        self.assertTrue(all(row['critical'] for row in result['ranks'] if row['alpha'] != 0.5))

    def test_parallel_output_matches_serial(self):
        self.assertEqual(run('rank', kappa=-1), run('rank', kappa=-1, parallel=True))


class SweepCommandTests(SimpleTestCase):
    def piece(self, kappa, alpha, duration):
        return HelicoidalPieceSerializer(HelicoidalPiece(HelicoidalFrame.standard(kappa, alpha), duration)).data

    def test_flat_vertices(self):
        text = run('sweep', self.piece(0, 1.0, 2.0), grid='5x4')
        mesh = read_obj(text)
        self.assertEqual(mesh.vertices.shape, (20, 4))
        self.assertEqual(mesh.triangles.shape, (24, 3))
        vertex = mesh.vertices[4 * 4 + 3]
        self.assertAlmostEqual(vertex[1], math.cos(2.0))
        self.assertAlmostEqual(vertex[2], math.sin(2.0))
        self.assertAlmostEqual(vertex[3], 2.0)

    def test_sphere_vertices(self):
        mesh = read_obj(run('sweep', self.piece(1, 0.5, 3.0), grid='6x6', s_extent=2.0))
        for vertex in mesh.vertices:
            self.assertAlmostEqual(metric_inner(1, vertex, vertex), 1.0, places=10)

    def test_degenerate_grid(self):
        with self.assertRaises(CommandError) as caught:
            run('sweep', self.piece(0, 1.0, 1.0), grid='1x4')
        self.assertEqual(caught.exception.returncode, 1)


class ResidualCommandTests(SimpleTestCase):
    def test_default_line(self):
        result = json.loads(run('residual_2piece', None, alphas=[1.0], per_axis=6))
        self.assertEqual(result['line'], geodesic(X_AXIS))
        self.assertEqual(len(result['results']), 1)
        self.assertGreater(result['results'][0]['residual'], 0.05)
