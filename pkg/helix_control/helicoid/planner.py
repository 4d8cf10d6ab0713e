"""Piecewise planners joining two oriented lines of Euclidean space.

Two families of admissible pieces are used:

    * alpha-helicoidal curves, three of which always suffice;
    * homogeneous (screw) curves R_{theta t}T_{lambda t}, two of which suffice.

Every planner returns a Plan that has already been executed, so its
endpoint_residual is populated.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Tuple, Union

import numpy as np
from scipy.optimize import bisect, least_squares
from scipy.spatial.transform import Rotation

from .admissible import ScrewParams, helicoid_ruled_data, homogeneous_line, ruled_residuals, screw_residuals
from .conf import solver_option, tolerance
from .exceptions import BrokenPlan, InvalidInput, PlannerFailure, UncontrollableAlpha, Unsupported
from .lines import (
    HelicoidalFrame,
    OrientedGeodesic,
    act_on_geodesic,
    canonical_distance,
    common_perpendicular_euclidean,
    euclidean_line,
    geodesics_equal,
    helicoidal_curve,
    normalize_pair,
    orthogonal_unit,
    reverse,
)
from .spaceform import Curvature, Isometry, SpacePoint, TangentVector, apply_isometry, isotropy_element

logger = logging.getLogger(__name__)

PLAN_SCHEMA_VERSION = 1
ADMISSIBILITY_SAMPLES = 32
UNDEFINED_RESIDUAL = 1e6


@dataclass(frozen=True, eq=False)
class HelicoidalPiece:
    frame: HelicoidalFrame
    duration: float

    kind = 'helicoidal'

    def __post_init__(self):
        if not math.isfinite(self.duration):
            raise InvalidInput('piece duration must be finite')
        object.__setattr__(self, 'duration', float(self.duration))

    @property
    def start(self):
        return self.frame.line

    @property
    def alpha(self):
        return self.frame.alpha

    def line_at(self, t):
        return helicoidal_curve(self.frame, t)

    def end(self):
        return self.line_at(self.duration)

    def moved(self, g):
        frame = self.frame
        moved_frame = HelicoidalFrame(
            act_on_geodesic(g, frame.line),
            apply_isometry(g, frame.point),
            apply_isometry(g, frame.axis),
            frame.alpha,
        )
        return HelicoidalPiece(moved_frame, self.duration)

    def frame_at(self, t):
        """The frame of the same motion restarted at time t"""
        g = self.frame.motion(t)
        return HelicoidalFrame(
            self.line_at(t),
            apply_isometry(g, self.frame.point),
            apply_isometry(g, self.frame.axis),
            self.frame.alpha,
        )


@dataclass(frozen=True, eq=False)
class ScrewPiece:
    params: ScrewParams
    start: OrientedGeodesic
    duration: float
    alpha: float

    kind = 'screw'

    def __post_init__(self):
        if not math.isfinite(self.duration):
            raise InvalidInput('piece duration must be finite')
        if not geodesics_equal(self.start, self.params.initial_line()):
            raise InvalidInput('screw piece does not start on its orbit')
        if max(screw_residuals(self.params, self.alpha)) > tolerance('validate'):
            raise InvalidInput('screw parameters are not admissible for this alpha')
        object.__setattr__(self, 'duration', float(self.duration))

    def line_at(self, t):
        return homogeneous_line(self.params, t)

    def end(self):
        return self.line_at(self.duration)


Piece = Union[HelicoidalPiece, ScrewPiece]


@dataclass(eq=False)
class Plan:
    alpha: float
    pieces: Tuple[Piece, ...]
    source: OrientedGeodesic
    target: OrientedGeodesic
    endpoint_residual: float = field(default=math.nan)

    def __len__(self):
        return len(self.pieces)


def execute_plan(plan, tol=None):
    tol = tolerance('equality') if tol is None else tol
    current = plan.source
    for index, piece in enumerate(plan.pieces):
        gap = canonical_distance(piece.start, current)
        if gap > tol:
            raise BrokenPlan(f"piece {index} starts {gap:.3g} away from the previous endpoint")
        current = piece.end().renormalized()
    plan.endpoint_residual = canonical_distance(current, plan.target)
    return current.canonicalize()


class PlanVerification(NamedTuple):
    endpoint: OrientedGeodesic
    endpoint_residual: float
    admissibility_residual: float

    def ok(self, tol):
        return self.endpoint_residual <= tol and self.admissibility_residual <= tol


def verify_plan(plan, tol=None):
    """Execute the plan and check every piece against its admissibility test"""
    endpoint = execute_plan(plan, tol)
    worst = 0.0
    for piece in plan.pieces:
        if isinstance(piece, ScrewPiece):
            worst = max(worst, *screw_residuals(piece.params, plan.alpha))
            continue
        for k in range(1, ADMISSIBILITY_SAMPLES + 1):
            t = piece.duration * k / (ADMISSIBILITY_SAMPLES + 1)
            worst = max(worst, *_sample_residuals(piece, t, plan.alpha))
    return PlanVerification(endpoint, plan.endpoint_residual, worst)


def _sample_residuals(piece, t, alpha):
    if piece.alpha == 0.0:
        # the rulings of a cylinder stay parallel
        drift = piece.line_at(t).direction.vec - piece.start.direction.vec
        return float(np.max(np.abs(drift))), abs(alpha)
    return ruled_residuals(*helicoid_ruled_data(piece.frame, t), alpha)


def _require_flat(*lines):
    if any(line.kappa != Curvature.FLAT for line in lines):
        raise Unsupported('planners are only available in Euclidean space')


def _finish(plan, tol):
    execute_plan(plan, tol)
    if plan.endpoint_residual > tol:
        raise PlannerFailure(
            f"plan endpoint misses the target by {plan.endpoint_residual:.3g}",
            diagnostics={'residual': plan.endpoint_residual, 'pieces': len(plan.pieces)},
        )
    logger.debug('plan with %d pieces, residual %.3g', len(plan.pieces), plan.endpoint_residual)
    return plan


def plan_parallel(source, target, tol=None):
    """alpha = 0: one piece sliding the line sideways to a parallel target"""
    _require_flat(source, target)
    tol = tolerance('equality') if tol is None else tol
    if geodesics_equal(source, target, tol):
        return _finish(Plan(0.0, (), source, target), tol)
    w = source.direction.spatial
    if np.max(np.abs(w - target.direction.spatial)) > tol:
        raise UncontrollableAlpha()
    offset = target.base.spatial - source.base.spatial
    offset = offset - np.dot(offset, w) * w
    distance = float(np.linalg.norm(offset))
    axis = TangentVector(source.base, np.concatenate([[0.0], offset / distance]))
    piece = HelicoidalPiece(HelicoidalFrame(source, source.base, axis, 0.0), distance)
    return _finish(Plan(0.0, (piece,), source, target), tol)


def _flat_ray(frame, t):
    """(points, directions) of the helicoidal rays at times t, vectorized"""
    t = np.atleast_1d(np.asarray(t, dtype=float))[:, None]
    centre = frame.point.spatial + t * frame.axis.spatial
    direction = (np.cos(frame.alpha * t) * frame.initial_direction.spatial
                 + np.sin(frame.alpha * t) * frame.binormal.spatial)
    return centre, direction


def _distance_to_x_axis(points, directions):
    normal_norm = np.hypot(directions[:, 1], directions[:, 2])
    skew = np.abs(points[:, 2] * directions[:, 1] - points[:, 1] * directions[:, 2])
    parallel = normal_norm < tolerance('exact')
    safe = np.where(parallel, 1.0, normal_norm)
    return np.where(parallel, np.hypot(points[:, 1], points[:, 2]), skew / safe)


def _crossings(frame, level):
    """Times of the first downward and the next upward crossing of distance = level"""
    def excess(t):
        return float(_distance_to_x_axis(*_flat_ray(frame, t))[0] - level)

    samples = solver_option('bracket_samples')
    xtol = solver_option('bisect_xtol')
    horizon = 2 * math.pi / abs(frame.alpha)
    for _ in range(4):
        times = np.linspace(0.0, horizon, samples)
        values = _distance_to_x_axis(*_flat_ray(frame, times)) - level
        below = np.nonzero(values <= 0)[0]
        if len(below) and below[0] > 0:
            break
        horizon *= 2
    else:
        raise PlannerFailure(
            'distance to the target never drops to a quarter pitch',
            diagnostics={'level': level, 'horizon': horizon},
        )
    i = below[0]
    roots = [bisect(excess, times[i - 1], times[i], xtol=xtol) if values[i] < 0 else float(times[i])]
    above = np.nonzero(values[i:] >= 0)[0]
    if len(above):
        j = i + above[0]
        roots.append(bisect(excess, times[j - 1], times[j], xtol=xtol) if values[j] > 0 else float(times[j]))
    return roots


def _wrap(angle):
    return (angle + math.pi) % (2 * math.pi) - math.pi


def _first_turn(line, distance, direction, alpha):
    """Piece 1: turn [s -> d e2 + s v] about e2 until it points along -sign(alpha) e3"""
    origin = SpacePoint.from_spatial([0.0, distance, 0.0])
    frame = HelicoidalFrame(line, origin, TangentVector(origin, [0.0, 0.0, 1.0, 0.0]), alpha)
    target_angle = -math.copysign(math.pi / 2, alpha)
    period = 2 * math.pi / abs(alpha)
    quarter = math.pi / (2 * abs(alpha))
    # the ray direction turns in the e1e3-plane with angle phi0 - alpha t
    phi0 = math.atan2(direction[2], direction[0])
    t_star = (phi0 - target_angle) / alpha
    lower = max(0.0, quarter - distance)
    t1 = t_star + period * math.ceil((lower - t_star) / period)
    if distance + t1 <= quarter:
        t1 += period
    w = helicoidal_curve(frame, t1).direction.spatial
    t1 += _wrap(math.atan2(w[2], w[0]) - target_angle) / alpha
    return HelicoidalPiece(frame, t1)


def plan_helicoidal_3(source, target, alpha, tol=None):
    _require_flat(source, target)
    tol = tolerance('equality') if tol is None else tol
    if alpha == 0:
        return plan_parallel(source, target, tol)
    if geodesics_equal(source, target, tol):
        return _finish(Plan(alpha, (), source, target), tol)

    normal = normalize_pair(source, target)
    g = normal.motion
    x_axis = euclidean_line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    first = _first_turn(act_on_geodesic(g, source), normal.distance, normal.direction, alpha)
    line1 = first.end()
    quarter = math.pi / (2 * abs(alpha))

    p1 = SpacePoint.from_spatial([0.0, normal.distance + first.duration, 0.0])
    frame2 = HelicoidalFrame(line1, p1, TangentVector(p1, [0.0, 1.0, 0.0, 0.0]), alpha)
    tried = []
    for t2 in _crossings(frame2, quarter):
        second = HelicoidalPiece(frame2, t2)
        line2 = second.end()
        perp = common_perpendicular_euclidean(line2, x_axis)
        if perp.parallel or perp.distance <= tolerance('exact'):
            continue
        axis = (perp.foot2.spatial - perp.foot1.spatial) / perp.distance
        for sign in (1.0, -1.0):
            frame3 = HelicoidalFrame(
                line2, perp.foot1, TangentVector(perp.foot1, np.concatenate([[0.0], sign * axis])), alpha)
            third = HelicoidalPiece(frame3, quarter)
            miss = canonical_distance(third.end(), x_axis)
            tried.append((t2, sign, miss))
            if miss <= tol:
                local = [p for p in (first, second, third) if p.duration != 0.0]
                back = g.inverse()
                plan = Plan(alpha, tuple(p.moved(back) for p in local), source, target)
                return _finish(plan, tol)
    logger.warning('three-piece construction failed: alpha=%s candidates=%s', alpha, tried)
    raise PlannerFailure(
        'no quarter-turn candidate reaches the target',
        diagnostics={'alpha': alpha, 'candidates': tried, 'distance': normal.distance},
    )


class ResidualGrid(NamedTuple):
    first_times: int = 10
    base_offsets: int = 10
    axis_angles: int = 10
    second_times: int = 10


def _symmetric_samples(extent, count):
    return np.union1d(np.linspace(-extent, extent, count), [0.0])


def two_piece_residual(line, alpha, grid=ResidualGrid(), target=None):
    """Smallest canonical distance from a two-piece helicoidal endpoint to the target.

    By the symmetries fixing both line and reverse(line), the first piece can be
    taken with its point at the origin and its axis along e2.
    """
    _require_flat(line)
    if alpha == 0:
        raise InvalidInput('two-piece search needs alpha != 0')
    target = reverse(line) if target is None else target
    g = normalize_pair(line, line).motion
    goal = act_on_geodesic(g, target)
    goal_base, goal_dir = goal.base.spatial, goal.direction.spatial

    period = 2 * math.pi / abs(alpha)
    t0 = _symmetric_samples(period, grid.first_times)
    offsets = _symmetric_samples(period, grid.base_offsets)
    angles = 2 * math.pi * np.arange(grid.axis_angles) / grid.axis_angles
    t1 = _symmetric_samples(period, grid.second_times)

    # broadcast axes: offsets x angles x second times x xyz
    s = offsets[:, None, None, None]
    c_th, s_th = np.cos(angles)[None, :, None, None], np.sin(angles)[None, :, None, None]
    tt = t1[None, None, :, None]
    best = math.inf
    for first_time in t0:
        ca, sa = math.cos(alpha * first_time), math.sin(alpha * first_time)
        w1 = np.array([ca, 0.0, -sa])
        n2 = np.array([sa, 0.0, ca])
        e2 = np.array([0.0, 1.0, 0.0])
        start = np.array([0.0, first_time, 0.0]) + s * w1
        axis = c_th * e2 + s_th * n2
        binormal = np.cross(axis, w1)
        point = start + tt * axis
        direction = np.cos(alpha * tt) * w1 + np.sin(alpha * tt) * binormal
        base = point - np.sum(point * direction, axis=-1, keepdims=True) * direction
        residual = np.maximum(
            np.max(np.abs(base - goal_base), axis=-1),
            np.max(np.abs(direction - goal_dir), axis=-1),
        )
        best = min(best, float(residual.min()))
    logger.debug('two-piece residual alpha=%s grid=%s: %.6g', alpha, tuple(grid), best)
    return best


class _ScrewPlacement(NamedTuple):
    frame: Isometry
    rho: float
    eta: float
    flipped: bool


def _place_screw(line, axis_point, axis_dir):
    """Frame putting the axis on e3 and line on [s -> rho e2 + s(sin eta e1 + cos eta e3)]"""
    axis_line = euclidean_line(axis_point, axis_dir)
    u = axis_line.direction.spatial
    w = line.direction.spatial
    perp = common_perpendicular_euclidean(axis_line, line)
    offset = perp.foot2.spatial - perp.foot1.spatial
    if perp.parallel:
        offset = offset - np.dot(offset, u) * u
        rho = float(np.linalg.norm(offset))
        n = offset / rho if rho > tolerance('exact') else orthogonal_unit(u)
    else:
        n = np.cross(u, w)
        n /= np.linalg.norm(n)
        rho = float(np.dot(offset, n))
        if rho < 0:
            n, rho = -n, -rho
    # Isometry.rigid needs (e1, n, u) orthonormal to machine precision
    n = n - np.dot(n, u) * u
    n /= np.linalg.norm(n)
    e1 = np.cross(n, u)
    e1 /= np.linalg.norm(e1)
    flipped = bool(np.dot(w, e1) < 0)
    if flipped:
        u, e1 = -u, -e1
    eta = math.atan2(max(float(np.dot(w, e1)), 0.0), float(np.dot(w, u)))
    frame = Isometry.rigid(np.column_stack([e1, n, u]), perp.foot1.spatial)
    return _ScrewPlacement(frame, rho, eta, flipped)


def _line_frame(line):
    """Motion taking the x-axis to line"""
    w = line.direction.spatial
    w = w / np.linalg.norm(w)
    n = orthogonal_unit(w)
    return Isometry.rigid(np.column_stack([w, n, np.cross(w, n)]), line.base.spatial)


def _screw_decomposition(mat):
    """(axis point, axis direction, angle, slide) of a flat motion, or None for translations"""
    rotation, shift = mat[1:, 1:], mat[1:, 0]
    rotvec = Rotation.from_matrix(rotation).as_rotvec()
    angle = float(np.linalg.norm(rotvec))
    if angle < tolerance('validate'):
        return None
    u = rotvec / angle
    slide = float(np.dot(shift, u))
    centre = np.linalg.lstsq(np.eye(3) - rotation, shift - slide * u, rcond=None)[0]
    return centre, u, angle, slide


def _trivial_hop(source, alpha):
    params = ScrewParams(theta=alpha, lam=1.0, rho=0.0, eta=math.pi / 2, frame=_line_frame(source))
    return ScrewPiece(params, source, 0.0, alpha)


def _closed_form_hop(source, target, alpha, tol):
    """Intersecting lines: half-turn about the bisector sliding pi/alpha"""
    perp = common_perpendicular_euclidean(source, target)
    if perp.parallel or perp.distance > tol:
        return None
    w, w_target = source.direction.spatial, target.direction.spatial
    bisector = (w + w_target) / np.linalg.norm(w + w_target)
    cos_eta = float(np.dot(w, bisector))
    pivot = perp.foot1.spatial - math.pi / (2 * alpha * cos_eta) * w
    try:
        placement = _place_screw(source, pivot, bisector)
        sin_eta = math.sin(placement.eta)
        theta = alpha / sin_eta
        params = ScrewParams(theta=theta, lam=1.0 / sin_eta, rho=0.0, eta=placement.eta, frame=placement.frame)
        return ScrewPiece(params, source, math.pi / theta, alpha)
    except InvalidInput:
        return None


class _CosetResidual:
    """Admissibility defect of the screw sending source to target, over the 2-parameter
    family of such motions: target_frame . k(beta, a) . source_frame^-1."""

    def __init__(self, source, target, alpha, turns):
        self.source = source
        self.alpha = alpha
        self.turns = turns
        self.source_inv = _line_frame(source).inverse().mat
        self.target_frame = _line_frame(target).mat

    def motion(self, z):
        k = isotropy_element(Curvature.FLAT, z[1], z[0]).mat
        return self.target_frame @ k @ self.source_inv

    def screw(self, z):
        decomposition = _screw_decomposition(self.motion(z))
        if decomposition is None:
            return None
        centre, u, angle, slide = decomposition
        try:
            placement = _place_screw(self.source, centre, u)
        except InvalidInput as exc:
            logger.debug('screw placement rejected at %s: %s', np.asarray(z).tolist(), exc)
            return None
        if placement.flipped:
            angle, slide = -angle, -slide
        angle += 2 * math.pi * self.turns
        return placement, angle, slide

    def __call__(self, z):
        screw = self.screw(z)
        if screw is None:
            return np.array([UNDEFINED_RESIDUAL])
        placement, angle, slide = screw
        sin_eta, cos_eta = math.sin(placement.eta), math.cos(placement.eta)
        return np.array([self.alpha * (slide * sin_eta + placement.rho * angle * cos_eta) - angle * sin_eta])

    def piece(self, z):
        screw = self.screw(z)
        if screw is None:
            return None
        placement, angle, slide = screw
        duration = abs(angle * math.sin(placement.eta)) / abs(self.alpha)
        if duration <= tolerance('exact'):
            return None
        params = ScrewParams(
            theta=angle / duration, lam=slide / duration,
            rho=placement.rho, eta=placement.eta, frame=placement.frame,
        )
        try:
            return ScrewPiece(params, self.source, duration, self.alpha)
        except InvalidInput:
            return None


def _refine(residual, seed, budget):
    """Trust-region least squares from one seed; None when the seed is unusable"""
    if residual(seed)[0] == UNDEFINED_RESIDUAL:
        return None
    try:
        result = least_squares(residual, seed, method='trf', xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=budget)
    except (ValueError, np.linalg.LinAlgError) as exc:
        logger.debug('least squares rejected seed %s: %s', seed.tolist(), exc)
        return None
    return result.x


def _seeds(alpha, count):
    reach = math.pi / (2 * abs(alpha))
    grid = [(a, b) for a in (0.0, reach, -reach) for b in (0.0, math.pi / 2, math.pi, -math.pi / 2)]
    return [np.array(z) for z in grid[:count]]


def screw_hop_solve(source, target, alpha, tol=None):
    """One admissible screw piece from source to target, or None when none is found"""
    _require_flat(source, target)
    if alpha == 0:
        raise InvalidInput('screw hops need alpha != 0')
    tol = tolerance('equality') if tol is None else tol
    if geodesics_equal(source, target, tol):
        return _trivial_hop(source, alpha)

    hop = _closed_form_hop(source, target, alpha, tol)
    if hop is not None and canonical_distance(hop.end(), target) <= tol:
        return hop

    budget = solver_option('max_iterations')
    for turns in (0, 1, -1):
        residual = _CosetResidual(source, target, alpha, turns)
        for seed_index, seed in enumerate(_seeds(alpha, solver_option('seeds'))):
            z = _refine(residual, seed, budget)
            if z is None:
                continue
            hop = residual.piece(z)
            if hop is not None and canonical_distance(hop.end(), target) <= tol:
                logger.debug('screw hop found (turns=%d, seed=%d)', turns, seed_index)
                return hop
    logger.debug('no screw hop between %r and %r for alpha=%s', source, target, alpha)
    return None


def _intermediates(source, target, alpha):
    """Lines orthogonal to both directions; the common-perpendicular line comes first"""
    perp = common_perpendicular_euclidean(source, target)
    w, w_target = source.direction.spatial, target.direction.spatial
    if perp.distance > tolerance('exact'):
        normal = (perp.foot2.spatial - perp.foot1.spatial) / perp.distance
    elif not perp.parallel:
        normal = np.cross(w, w_target)
        normal /= np.linalg.norm(normal)
    else:
        normal = orthogonal_unit(w)
    side = np.cross(normal, w)
    origin = perp.foot1.spatial
    reach = math.pi / (2 * abs(alpha))
    offsets = [(0.0, 0.0)] + [(a, b) for a in (0.0, reach, -reach) for b in (0.0, reach, -reach) if (a, b) != (0.0, 0.0)]
    for orientation in (1.0, -1.0):
        for a, b in offsets:
            yield euclidean_line(origin + a * w + b * side, orientation * normal)


def plan_homogeneous_2(source, target, alpha, tol=None):
    _require_flat(source, target)
    if alpha == 0:
        raise InvalidInput('screw plans need alpha != 0')
    tol = tolerance('equality') if tol is None else tol
    if geodesics_equal(source, target, tol):
        return _finish(Plan(alpha, (), source, target), tol)

    hop = screw_hop_solve(source, target, alpha, tol)
    if hop is not None:
        return _finish(Plan(alpha, (hop,), source, target), tol)

    for index, middle in enumerate(_intermediates(source, target, alpha)):
        first = screw_hop_solve(source, middle, alpha, tol)
        if first is None:
            continue
        second = screw_hop_solve(first.end(), target, alpha, tol)
        if second is None:
            continue
        logger.debug('two screw hops through intermediate %d', index)
        return _finish(Plan(alpha, (first, second), source, target), tol)
    logger.warning('no two-hop screw plan: source=%r target=%r alpha=%s', source, target, alpha)
    raise PlannerFailure(
        'no intermediate line yields two admissible screw hops',
        diagnostics={'alpha': alpha, 'source': repr(source), 'target': repr(target)},
    )
