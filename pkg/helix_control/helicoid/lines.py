"""Oriented geodesics of M_kappa, their canonical forms and helicoidal motions."""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .conf import tolerance
from .exceptions import InvalidInput, Unsupported
from .spaceform import (
    Curvature,
    Isometry,
    SpacePoint,
    TangentVector,
    apply_isometry,
    basis,
    cross,
    geodesic_point,
    geodesic_velocity,
    metric_inner,
    parallel_transport,
    screw_exponential,
)

logger = logging.getLogger(__name__)


def orthogonal_unit(w):
    """Some unit 3-vector orthogonal to w"""
    w = np.asarray(w, dtype=float)
    helper = np.eye(3)[int(np.argmin(np.abs(w)))]
    n = np.cross(w, helper)
    return n / np.linalg.norm(n)


@dataclass(frozen=True, eq=False)
class OrientedGeodesic:
    """A complete oriented geodesic, stored as a base point and unit direction."""

    base: SpacePoint
    direction: TangentVector
    canonical: bool = False

    def __post_init__(self):
        tol = tolerance('validate')
        if self.direction.base.distance_to(self.base) > tol * max(1.0, float(np.max(np.abs(self.base.coords)))):
            raise InvalidInput('geodesic direction is not based at its base point')
        if not self.direction.is_unit():
            raise InvalidInput(f"geodesic direction must be unit, got norm {self.direction.norm}")

    @property
    def kappa(self):
        return self.base.kappa

    def point(self, s):
        return geodesic_point(self.base, self.direction, s)

    def velocity(self, s):
        return geodesic_velocity(self.base, self.direction, s)

    def parameter_of(self, q):
        """Arclength parameter of the point of this geodesic matching q"""
        p, v = self.base.coords, self.direction.vec
        if self.kappa == Curvature.FLAT:
            return float(np.dot(q.spatial - p[1:], v[1:]))
        if self.kappa == Curvature.SPHERICAL:
            return math.atan2(metric_inner(1, q.coords, v), metric_inner(1, q.coords, p))
        return math.asinh(metric_inner(-1, q.coords, v))

    def contains(self, q, tol=None):
        tol = tolerance('validate') if tol is None else tol
        closest = self.point(self.parameter_of(q))
        return closest.distance_to(q) <= tol * max(1.0, float(np.max(np.abs(q.coords))))

    def velocity_at(self, q):
        return self.velocity(self.parameter_of(q))

    def canonicalize(self):
        return from_point_direction(self.kappa, self.base, self.direction)

    def renormalized(self):
        """Base back on the space form, direction unit and tangent there"""
        base = self.base.renormalized()
        return OrientedGeodesic(base, TangentVector.project(base, self.direction.vec).unit(), self.canonical)

    def __repr__(self):
        return (f"OrientedGeodesic(kappa={int(self.kappa)}, base={self.base.coords.tolist()}, "
                f"dir={self.direction.vec.tolist()})")


def _canonical_parameter(kappa, p, v):
    if kappa == Curvature.HYPERBOLIC:
        # closest point to e0 minimizes cosh(s) p0 + sinh(s) v0
        return math.atanh(-v[0] / p[0])
    # sphere: maximize x0 along the circle; fall back to x1, x2, x3 on ties
    for i in range(4):
        if math.hypot(p[i], v[i]) > tolerance('validate'):
            return math.atan2(v[i], p[i])
    return 0.0


def from_point_direction(kappa, p, v):
    kappa = Curvature.coerce(kappa)
    if p.kappa != kappa or v.kappa != kappa:
        raise InvalidInput('point, direction and kappa disagree')
    if v.base.distance_to(p) > tolerance('validate') * max(1.0, float(np.max(np.abs(p.coords)))):
        raise InvalidInput('direction is not tangent at the given point')
    if not v.is_unit():
        raise InvalidInput(f"direction must be a unit vector, got norm {v.norm}")
    if kappa == Curvature.FLAT:
        u, w = p.spatial, v.spatial
        base = SpacePoint.from_spatial(u - np.dot(u, w) * w)
        return OrientedGeodesic(base, TangentVector(base, v.vec), canonical=True)
    s = _canonical_parameter(kappa, p.coords, v.vec)
    velocity = geodesic_velocity(p, v, s)
    return OrientedGeodesic(velocity.base, velocity, canonical=True)


def euclidean_line(point, direction):
    """Flat geodesic through a spatial point with the (normalized) spatial direction"""
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        raise InvalidInput('line direction must be nonzero')
    base = SpacePoint.from_spatial(point)
    return from_point_direction(0, base, TangentVector(base, np.concatenate([[0.0], direction / norm])))


def reverse(line):
    return from_point_direction(line.kappa, line.base, -line.direction)


def canonical_distance(first, second):
    """Sup-norm distance between canonical coordinates (Phi-coordinates on the sphere)"""
    if first.kappa != second.kappa:
        raise InvalidInput('cannot compare geodesics of different curvature')
    if first.kappa == Curvature.SPHERICAL:
        from .quatsphere import phi_map
        a, b = phi_map(first), phi_map(second)
        return float(max(np.max(np.abs(a.x - b.x)), np.max(np.abs(a.y - b.y))))
    first, second = first.canonicalize(), second.canonicalize()
    return float(max(
        np.max(np.abs(first.base.coords - second.base.coords)),
        np.max(np.abs(first.direction.vec - second.direction.vec)),
    ))


def geodesics_equal(first, second, tol=None):
    tol = tolerance('equality') if tol is None else tol
    return canonical_distance(first, second) <= tol


class CommonPerpendicular(NamedTuple):
    distance: float
    foot1: SpacePoint
    foot2: SpacePoint
    parallel: bool


def common_perpendicular_euclidean(first, second):
    if first.kappa != Curvature.FLAT or second.kappa != Curvature.FLAT:
        raise Unsupported('common perpendicular is only implemented for Euclidean lines')
    p1, w1 = first.base.spatial, first.direction.spatial
    p2, w2 = second.base.spatial, second.direction.spatial
    r = p1 - p2
    b = float(np.dot(w1, w2))
    denom = 1.0 - b * b
    if denom <= tolerance('exact'):
        foot1 = p1
        foot2 = p2 + np.dot(p1 - p2, w2) * w2
        parallel = True
    else:
        d, e = float(np.dot(w1, r)), float(np.dot(w2, r))
        foot1 = p1 + (b * e - d) / denom * w1
        foot2 = p2 + (e - b * d) / denom * w2
        parallel = False
    return CommonPerpendicular(
        distance=float(np.linalg.norm(foot2 - foot1)),
        foot1=SpacePoint.from_spatial(foot1),
        foot2=SpacePoint.from_spatial(foot2),
        parallel=parallel,
    )


@dataclass(frozen=True, eq=False)
class HelicoidalFrame:
    """Initial ray, point on it and unit axis of an alpha-helicoidal motion."""

    line: OrientedGeodesic
    point: SpacePoint
    axis: TangentVector
    alpha: float

    def __post_init__(self):
        tol = tolerance('validate')
        if not math.isfinite(self.alpha):
            raise InvalidInput('alpha must be finite')
        if self.point.kappa != self.line.kappa:
            raise InvalidInput('frame point and ray live in different space forms')
        if not self.line.contains(self.point):
            raise InvalidInput('frame point does not lie on the initial ray')
        if self.axis.base.distance_to(self.point) > tol * max(1.0, float(np.max(np.abs(self.point.coords)))):
            raise InvalidInput('axis is not based at the frame point')
        if not self.axis.is_unit():
            raise InvalidInput(f"axis must be a unit vector, got norm {self.axis.norm}")
        if abs(self.axis.inner(self.line.velocity_at(self.point))) > tol:
            raise InvalidInput('axis is not orthogonal to the initial ray')
        object.__setattr__(self, 'alpha', float(self.alpha))

    @classmethod
    def standard(cls, kappa, alpha):
        """(l_o, e0, e3): the x-axis family pushed along e3"""
        origin = SpacePoint.origin(kappa)
        line = from_point_direction(kappa, origin, TangentVector(origin, basis(1)))
        return cls(line, origin, TangentVector(origin, basis(3)), alpha)

    @property
    def kappa(self):
        return self.line.kappa

    @property
    def initial_direction(self):
        return self.line.velocity_at(self.point)

    @property
    def binormal(self):
        """B = A x sigma'(0)"""
        return cross(self.point, self.axis, self.initial_direction)

    @property
    def pitch(self):
        return math.inf if self.alpha == 0 else 2 * math.pi / abs(self.alpha)

    def placement(self):
        """Isometry taking the standard frame (e0; e1, e2, e3) to (p; sigma'(0), B, A)"""
        return Isometry.from_frame(self.point, self.initial_direction, self.binormal, self.axis)

    def motion(self, t):
        """The screw g S_t g^-1 that carries the initial ray to time t"""
        g = self.placement()
        return g @ screw_exponential(self.kappa, self.alpha, t) @ g.inverse()


def helicoid_point(frame, s, t):
    """gamma_{cos(alpha t) V_t + sin(alpha t) B_t}(s) from the axis point at time t"""
    p, axis = frame.point, frame.axis
    centre = geodesic_point(p, axis, t)
    v_t = parallel_transport(p, axis, frame.initial_direction, t)
    b_t = parallel_transport(p, axis, frame.binormal, t)
    ray = TangentVector(centre, math.cos(frame.alpha * t) * v_t.vec + math.sin(frame.alpha * t) * b_t.vec)
    return geodesic_point(centre, ray, s)


def helicoidal_curve(frame, t):
    return act_on_geodesic(frame.motion(t), frame.line)


def act_on_geodesic(g, line):
    if g.kappa != line.kappa:
        raise InvalidInput('isometry and geodesic live in different space forms')
    return from_point_direction(line.kappa, apply_isometry(g, line.base), apply_isometry(g, line.direction))


class PairNormalForm(NamedTuple):
    motion: Isometry
    distance: float
    direction: np.ndarray


def normalize_pair(source, target):
    """g with g.target = x-axis and g.source = [s -> d e2 + s v], v orthogonal to e2"""
    if source.kappa != Curvature.FLAT or target.kappa != Curvature.FLAT:
        raise Unsupported('pair normalization is only implemented for Euclidean lines')
    perp = common_perpendicular_euclidean(target, source)
    w_target = target.direction.spatial
    w_source = source.direction.spatial
    offset = perp.foot2.spatial - perp.foot1.spatial
    if not perp.parallel:
        normal = np.cross(w_target, w_source)
        normal /= np.linalg.norm(normal)
        if np.dot(normal, offset) < 0:
            normal = -normal
        distance = abs(float(np.dot(offset, normal)))
    elif perp.distance > tolerance('exact'):
        normal = offset / perp.distance
        distance = perp.distance
    else:
        normal = orthogonal_unit(w_target)
        distance = 0.0
    rotation = np.column_stack([w_target, normal, np.cross(w_target, normal)])
    g = Isometry.rigid(rotation, perp.foot1.spatial).inverse()
    direction = rotation.T @ w_source
    direction[1] = 0.0
    direction /= np.linalg.norm(direction)
    return PairNormalForm(g, distance, direction)
