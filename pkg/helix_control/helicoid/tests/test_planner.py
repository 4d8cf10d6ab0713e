import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given

from helicoid.admissible import screw_residuals
from helicoid.exceptions import BrokenPlan, InvalidInput, PlannerFailure, UncontrollableAlpha, Unsupported
from helicoid.lines import (
    HelicoidalFrame,
    act_on_geodesic,
    canonical_distance,
    euclidean_line,
    geodesics_equal,
    reverse,
)
from helicoid.planner import (
    HelicoidalPiece,
    Plan,
    ResidualGrid,
    ScrewPiece,
    _place_screw,
    execute_plan,
    plan_helicoidal_3,
    plan_homogeneous_2,
    plan_parallel,
    screw_hop_solve,
    two_piece_residual,
    verify_plan,
)
from helicoid.spaceform import Curvature, TangentVector

from .strategies import line_pairs, nonzero_alphas, random_line, random_motion, rigid_motions

X_AXIS = euclidean_line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])


def random_alpha(rng, low=0.2, high=5.0):
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(low, high))


class HelicoidalPieceTests(SimpleTestCase):
    def test_moved_piece_ends_on_the_moved_line(self):
        rng = np.random.default_rng(11)
        piece = HelicoidalPiece(HelicoidalFrame.standard(Curvature.FLAT, 1.3), 0.8)
        g = random_motion(rng)
        self.assertTrue(geodesics_equal(piece.moved(g).end(), act_on_geodesic(g, piece.end()), 1e-10))

    def test_frame_at_restarts_the_same_motion(self):
        piece = HelicoidalPiece(HelicoidalFrame.standard(Curvature.FLAT, -0.7), 2.0)
        restarted = HelicoidalPiece(piece.frame_at(0.5), 1.5)
        self.assertTrue(geodesics_equal(restarted.end(), piece.end(), 1e-10))

    def test_duration_must_be_finite(self):
        with self.assertRaises(InvalidInput):
            HelicoidalPiece(HelicoidalFrame.standard(Curvature.FLAT, 1.0), math.inf)


class ThreePieceTests(SimpleTestCase):
    def test_random_pairs_are_joined_by_at_most_three_pieces(self):
        rng = np.random.default_rng(2024)
        for index in range(500):
            source, target, alpha = random_line(rng), random_line(rng), random_alpha(rng)
            with self.subTest(index=index, alpha=alpha):
                plan = plan_helicoidal_3(source, target, alpha)
                self.assertLessEqual(len(plan), 3)
                self.assertLessEqual(plan.endpoint_residual, 1e-7)

    def test_reverse_line_needs_three_pieces(self):
        for alpha in (0.5, 1.0, -2.0):
            with self.subTest(alpha=alpha):
                plan = plan_helicoidal_3(X_AXIS, reverse(X_AXIS), alpha)
                self.assertEqual(len(plan), 3)
                self.assertLessEqual(plan.endpoint_residual, 1e-7)

    def test_parallel_and_intersecting_pairs(self):
        targets = (
            euclidean_line([0.0, 3.0, 0.0], [1.0, 0.0, 0.0]),
            euclidean_line([0.0, 0.0, -2.0], [-1.0, 0.0, 0.0]),
            euclidean_line([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
            euclidean_line([0.0, 0.01, 0.0], [0.0, 0.0, 1.0]),
        )
        for target in targets:
            with self.subTest(target=target):
                plan = plan_helicoidal_3(X_AXIS, target, 1.0)
                self.assertLessEqual(plan.endpoint_residual, 1e-7)

    def test_equal_lines_need_no_pieces(self):
        plan = plan_helicoidal_3(X_AXIS, X_AXIS, 1.0)
        self.assertEqual(len(plan), 0)
        self.assertEqual(plan.endpoint_residual, 0.0)

    @given(line_pairs(), rigid_motions(), nonzero_alphas(0.2, 5.0))
    def test_plans_are_equivariant(self, pair, g, alpha):
        source, target = pair
        plan = plan_helicoidal_3(source, target, alpha)
        moved = plan_helicoidal_3(act_on_geodesic(g, source), act_on_geodesic(g, target), alpha)
        self.assertLess(canonical_distance(execute_plan(moved), act_on_geodesic(g, execute_plan(plan))), 1e-8)
        self.assertEqual(len(moved), len(plan))

    @given(line_pairs(), nonzero_alphas(0.2, 5.0))
    def test_pieces_are_admissible(self, pair, alpha):
        verification = verify_plan(plan_helicoidal_3(*pair, alpha))
        self.assertLess(verification.admissibility_residual, 1e-8)
        self.assertTrue(verification.ok(1e-7))

    def test_plans_need_flat_space(self):
        frame = HelicoidalFrame.standard(Curvature.SPHERICAL, 1.0)
        with self.assertRaises(Unsupported):
            plan_helicoidal_3(frame.line, frame.line, 1.0)


class ParallelPlanTests(SimpleTestCase):
    def test_zero_alpha_slides_to_a_parallel_line(self):
        target = euclidean_line([4.0, 1.0, -2.0], [1.0, 0.0, 0.0])
        plan = plan_helicoidal_3(X_AXIS, target, 0.0)
        self.assertEqual(len(plan), 1)
        self.assertAlmostEqual(plan.pieces[0].duration, math.hypot(1.0, 2.0))
        self.assertLessEqual(plan.endpoint_residual, 1e-12)
        for t in (0.3, 1.0, 2.0):
            np.testing.assert_allclose(plan.pieces[0].line_at(t).direction.vec, X_AXIS.direction.vec, atol=1e-12)

    def test_zero_alpha_cannot_turn(self):
        with self.assertRaises(UncontrollableAlpha):
            plan_parallel(X_AXIS, euclidean_line([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]))
        with self.assertRaises(UncontrollableAlpha):
            plan_helicoidal_3(X_AXIS, reverse(X_AXIS), 0.0)

    def test_identical_lines(self):
        self.assertEqual(len(plan_parallel(X_AXIS, X_AXIS)), 0)


class ExecutionTests(SimpleTestCase):
    def test_broken_chain_is_reported(self):
        elsewhere = euclidean_line([0.0, 5.0, 0.0], [1.0, 0.0, 0.0])
        point = elsewhere.base
        piece = HelicoidalPiece(HelicoidalFrame(elsewhere, point, TangentVector(point, [0.0, 0.0, 0.0, 1.0]), 1.0), 1.0)
        with self.assertRaises(BrokenPlan):
            execute_plan(Plan(1.0, (piece,), X_AXIS, X_AXIS))

    def test_execution_records_the_residual(self):
        piece = HelicoidalPiece(HelicoidalFrame.standard(Curvature.FLAT, 1.0), math.pi)
        plan = Plan(1.0, (piece,), piece.start, reverse(X_AXIS))
        endpoint = execute_plan(plan)
        self.assertTrue(math.isnan(Plan(1.0, (), X_AXIS, X_AXIS).endpoint_residual))
        self.assertAlmostEqual(plan.endpoint_residual, canonical_distance(endpoint, reverse(X_AXIS)))
        self.assertAlmostEqual(plan.endpoint_residual, math.pi)

    def test_long_chains_stay_on_unit_directions(self):
        pieces = [HelicoidalPiece(HelicoidalFrame.standard(Curvature.FLAT, 1.0), math.pi / 2)]
        for _ in range(39):
            previous = pieces[-1]
            pieces.append(HelicoidalPiece(previous.frame_at(previous.duration), math.pi / 2))
        target = euclidean_line([0.0, 0.0, 20 * math.pi], [1.0, 0.0, 0.0])
        endpoint = execute_plan(Plan(1.0, tuple(pieces), X_AXIS, target))
        self.assertAlmostEqual(float(np.linalg.norm(endpoint.direction.spatial)), 1.0, places=14)
        self.assertLess(canonical_distance(endpoint, target), 1e-9)


class VerificationTests(SimpleTestCase):
    def test_matching_alpha_passes(self):
        piece = HelicoidalPiece(HelicoidalFrame.standard(Curvature.FLAT, 1.5), 2.0)
        verification = verify_plan(Plan(1.5, (piece,), piece.start, piece.end()))
        self.assertLess(verification.admissibility_residual, 1e-8)
        self.assertTrue(verification.ok(1e-7))

    def test_piece_swept_at_another_alpha_fails(self):
        piece = HelicoidalPiece(HelicoidalFrame.standard(Curvature.FLAT, 1.0), 2.0)
        verification = verify_plan(Plan(2.0, (piece,), piece.start, piece.end()))
        self.assertAlmostEqual(verification.admissibility_residual, 1.0, places=6)
        self.assertFalse(verification.ok(1e-7))

    def test_sliding_pieces_have_no_turn(self):
        target = euclidean_line([0.0, 2.0, 1.0], [1.0, 0.0, 0.0])
        verification = verify_plan(plan_parallel(X_AXIS, target))
        self.assertLess(verification.admissibility_residual, 1e-12)
        self.assertTrue(verification.ok(1e-7))

    def test_sliding_piece_in_a_turning_plan_fails(self):
        target = euclidean_line([0.0, 2.0, 0.0], [1.0, 0.0, 0.0])
        piece = plan_parallel(X_AXIS, target).pieces[0]
        self.assertAlmostEqual(verify_plan(Plan(0.5, (piece,), X_AXIS, target)).admissibility_residual, 0.5)


class TwoPieceResidualTests(SimpleTestCase):
    def test_two_pieces_do_not_reverse_a_line(self):
        for alpha in (0.5, 1.0, 2.0):
            with self.subTest(alpha=alpha):
                self.assertGreater(two_piece_residual(X_AXIS, alpha), 0.05)

    def test_refinement_keeps_the_gap(self):
        fine = ResidualGrid(40, 40, 40, 40)
        for alpha in (0.5, 1.0, 2.0):
            with self.subTest(alpha=alpha):
                self.assertGreater(two_piece_residual(X_AXIS, alpha, fine), 0.01)

    def test_the_line_itself_is_reachable(self):
        line = euclidean_line([1.0, -2.0, 0.5], [0.3, 0.4, 1.0])
        self.assertLess(two_piece_residual(line, 1.0, target=line), 1e-12)

    def test_zero_alpha_is_rejected(self):
        with self.assertRaises(InvalidInput):
            two_piece_residual(X_AXIS, 0.0)


class ScrewHopTests(SimpleTestCase):
    def test_intersecting_lines_use_a_half_turn(self):
        target = euclidean_line([0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        hop = screw_hop_solve(X_AXIS, target, 1.0)
        self.assertIsInstance(hop, ScrewPiece)
        self.assertAlmostEqual(hop.params.theta, math.sqrt(2.0))
        self.assertAlmostEqual(hop.params.lam, math.sqrt(2.0))
        self.assertAlmostEqual(hop.params.rho, 0.0)
        self.assertAlmostEqual(hop.params.eta, math.pi / 4)
        self.assertAlmostEqual(hop.duration, math.pi / math.sqrt(2.0))
        self.assertLess(canonical_distance(hop.end(), target), 1e-9)

    def test_tilted_lines_in_a_plane_use_the_vertical_axis(self):
        alpha, eta = 2.0, math.pi / 3
        source = euclidean_line([0.0, 0.0, 0.0], [math.sin(eta), 0.0, math.cos(eta)])
        target = euclidean_line([0.0, 0.0, math.pi / alpha], [-math.sin(eta), 0.0, math.cos(eta)])
        hop = screw_hop_solve(source, target, alpha)
        theta = alpha / math.sin(eta)
        self.assertAlmostEqual(hop.params.theta, theta)
        self.assertAlmostEqual(hop.params.lam, 1.0 / math.sin(eta))
        self.assertAlmostEqual(hop.params.rho, 0.0)
        self.assertAlmostEqual(hop.params.eta, eta)
        self.assertAlmostEqual(hop.duration, math.pi / theta)
        self.assertLess(canonical_distance(hop.end(), target), 1e-9)

    def test_axis_close_to_the_line_gives_a_rigid_frame(self):
        u = np.array([0.2, 0.1, 1.0]) / np.linalg.norm([0.2, 0.1, 1.0])
        n = np.cross(u, [1.0, 0.0, 0.0])
        n /= np.linalg.norm(n)
        placement = _place_screw(X_AXIS, np.array([0.3, 0.0, 0.0]) + 3e-8 * n, u)
        self.assertAlmostEqual(placement.rho, 3e-8, places=12)
        rotation = placement.frame.mat[1:, 1:]
        np.testing.assert_allclose(rotation.T @ rotation, np.eye(3), atol=1e-14)
        eta = placement.eta
        standard = euclidean_line([0.0, placement.rho, 0.0], [math.sin(eta), 0.0, math.cos(eta)])
        self.assertLess(canonical_distance(act_on_geodesic(placement.frame, standard), X_AXIS), 1e-9)

    def test_equal_lines_give_an_empty_hop(self):
        hop = screw_hop_solve(X_AXIS, X_AXIS, 2.0)
        self.assertEqual(hop.duration, 0.0)
        self.assertTrue(geodesics_equal(hop.end(), X_AXIS))

    def test_reverse_line_has_no_single_hop(self):
        self.assertIsNone(screw_hop_solve(X_AXIS, reverse(X_AXIS), 1.0))

    def test_reverse_line_takes_two_hops(self):
        for alpha in (1.0, -0.5):
            with self.subTest(alpha=alpha):
                plan = plan_homogeneous_2(X_AXIS, reverse(X_AXIS), alpha)
                self.assertEqual(len(plan), 2)
                self.assertLessEqual(plan.endpoint_residual, 1e-7)

    def test_random_pairs_take_at_most_two_hops(self):
        rng = np.random.default_rng(7)
        successes = 0
        for index in range(200):
            source, target, alpha = random_line(rng), random_line(rng), random_alpha(rng)
            try:
                plan = plan_homogeneous_2(source, target, alpha)
            except PlannerFailure:
                continue
            successes += 1
            with self.subTest(index=index, alpha=alpha):
                self.assertLessEqual(len(plan), 2)
                self.assertLess(plan.endpoint_residual, 1e-6)
                for piece in plan.pieces:
                    self.assertLess(max(screw_residuals(piece.params, alpha)), 1e-8)
        self.assertGreaterEqual(successes, 198)

    def test_screw_plans_verify(self):
        plan = plan_homogeneous_2(X_AXIS, euclidean_line([0.0, 2.0, 1.0], [0.0, 1.0, 1.0]), 1.5)
        self.assertTrue(verify_plan(plan).ok(1e-7))

    def test_screw_piece_must_start_on_its_orbit(self):
        hop = screw_hop_solve(X_AXIS, euclidean_line([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]), 1.0)
        with self.assertRaises(InvalidInput):
            ScrewPiece(hop.params, reverse(X_AXIS), hop.duration, 1.0)
        with self.assertRaises(InvalidInput):
            ScrewPiece(hop.params, X_AXIS, hop.duration, 2.0)

    def test_zero_alpha_is_rejected(self):
        with self.assertRaises(InvalidInput):
            plan_homogeneous_2(X_AXIS, reverse(X_AXIS), 0.0)
