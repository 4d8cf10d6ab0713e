"""Quaternion model of the sphere S^3 and of its oriented great circles.

R^4 is identified with the quaternions by (x0, x1, x2, x3) = x0 + x1 i + x2 j + x3 k.
Unit quaternions act on imaginary quaternions by f(p)x = p x conj(p) (SO(3)) and
on all quaternions by F(p, q)y = p y conj(q) (SO(4)). The oriented great circles
are then identified with pairs of unit imaginary quaternions through

    Phi((a, b) . c_o) = (a i conj(a), b i conj(b)),   c_o(s) = e^{is}.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from .conf import hopf_right_reversed, tolerance
from .exceptions import InvalidInput, Unsupported
from .lines import act_on_geodesic, from_point_direction
from .spaceform import Curvature, Isometry, SpacePoint, TangentVector, basis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float
    y: float
    z: float

    @classmethod
    def from_vector(cls, values):
        w, x, y, z = (float(v) for v in values)
        return cls(w, x, y, z)

    @classmethod
    def imaginary(cls, xyz):
        x, y, z = (float(v) for v in xyz)
        return cls(0.0, x, y, z)

    def as_vector(self):
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def vector_part(self):
        return np.array([self.x, self.y, self.z])

    def __add__(self, other):
        return Quaternion.from_vector(self.as_vector() + other.as_vector())

    def __sub__(self, other):
        return Quaternion.from_vector(self.as_vector() - other.as_vector())

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if not isinstance(other, Quaternion):
            return Quaternion.from_vector(float(other) * self.as_vector())
        a1, b1, c1, d1 = self.w, self.x, self.y, self.z
        a2, b2, c2, d2 = other.w, other.x, other.y, other.z
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self):
        return float(np.linalg.norm(self.as_vector()))

    def inverse(self):
        norm2 = self.norm() ** 2
        if norm2 == 0.0:
            raise InvalidInput('the zero quaternion has no inverse')
        return self.conjugate() * (1.0 / norm2)

    def normalized(self):
        return Quaternion.from_vector(self.as_vector() / self.norm())


ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def qexp(v):
    """exp of an imaginary quaternion"""
    angle = float(np.linalg.norm(v.vector_part))
    if angle == 0.0:
        return ONE
    axis = v.vector_part / angle
    return Quaternion(math.cos(angle), *(math.sin(angle) * axis))


def _require_unit(q, name):
    if abs(q.norm() - 1.0) > tolerance('validate'):
        raise InvalidInput(f"{name} must be a unit quaternion, got norm {q.norm()}")


def rot3(p, x):
    """f(p)x = p x conj(p)"""
    _require_unit(p, 'p')
    return p * x * p.conjugate()


def rot4(p, q, y):
    """F(p, q)y = p y conj(q)"""
    _require_unit(p, 'p')
    _require_unit(q, 'q')
    return p * y * q.conjugate()


def rot4_matrix(p, q):
    """F(p, q) as a 4x4 matrix on embedded coordinates"""
    mat = np.column_stack([rot4(p, q, Quaternion.from_vector(basis(i))).as_vector() for i in range(4)])
    return Isometry(Curvature.SPHERICAL, mat)


def r_beta(beta):
    """R_beta(q) = e^{beta k/2} q e^{-beta k/2}"""
    h = qexp(K * (beta / 2))
    return rot4_matrix(h, h)


def t_tau(tau):
    """T_tau(q) = e^{tau k/2} q e^{tau k/2}, the transvection along c(t) = e^{tk}"""
    h = qexp(K * (tau / 2))
    return rot4_matrix(h, h.conjugate())


def standard_circle():
    """c_o(s) = e^{is}"""
    origin = SpacePoint.origin(Curvature.SPHERICAL)
    return from_point_direction(Curvature.SPHERICAL, origin, TangentVector(origin, basis(1)))


def circle_action(p, q, line):
    """(p, q) . line"""
    return act_on_geodesic(rot4_matrix(p, q), line)


@dataclass(frozen=True, eq=False)
class SphereCirclePoint:
    """Phi-image (x, y) of an oriented great circle, imaginary parts only."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        tol = tolerance('validate')
        for name in ('x', 'y'):
            value = np.array(getattr(self, name), dtype=float).reshape(3)
            if abs(np.linalg.norm(value) - 1.0) > tol:
                raise InvalidInput(f"{name} must be a unit imaginary quaternion, got {value.tolist()}")
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def as_quaternions(self):
        return Quaternion.imaginary(self.x), Quaternion.imaginary(self.y)


def phi_map(line):
    """(v conj(p), conj(p) v) for any point p of the circle with velocity v there.

    Writing the circle as s -> a e^{is} conj(b) gives p = a conj(b) and
    v = a i conj(b), so v conj(p) = a i conj(a) and conj(p) v = b i conj(b).
    """
    if line.kappa != Curvature.SPHERICAL:
        raise Unsupported('Phi is only defined for great circles of S^3')
    p = Quaternion.from_vector(line.base.coords)
    v = Quaternion.from_vector(line.direction.vec)
    x = v * p.conjugate()
    y = p.conjugate() * v
    return SphereCirclePoint(x.vector_part, y.vector_part)


def _lift(target):
    """Unit a with a i conj(a) = target"""
    xyz = np.asarray(target, dtype=float)
    # 1 - target*i = 1 + <i, target> + i x target, normalized: half-angle rotation
    candidate = ONE - Quaternion.imaginary(xyz) * I
    if candidate.norm() <= tolerance('validate'):
        return J
    return candidate.normalized()


def phi_inverse(x, y):
    point = SphereCirclePoint(x, y)
    a, b = _lift(point.x), _lift(point.y)
    p = a * b.conjugate()
    v = a * I * b.conjugate()
    base = SpacePoint(Curvature.SPHERICAL, p.as_vector())
    return from_point_direction(Curvature.SPHERICAL, base, TangentVector(base, v.as_vector()))


def _rotate_i(beta):
    """R_beta(i) as a 3-vector"""
    return np.array([math.cos(beta), math.sin(beta), 0.0])


def gamma_sphere(alpha, t):
    """Phi-image of the standard helicoidal curve at time t.

    The standard circle at time t is e^{(1+alpha)tk/2} c_o e^{(1-alpha)tk/2}, so the
    second lift is e^{(alpha-1)tk/2} and the second factor turns at rate alpha-1.
    """
    return SphereCirclePoint(_rotate_i(t * (1 + alpha)), _rotate_i(t * (alpha - 1)))


def gamma_sphere_velocity(alpha, t):
    """d/dt of gamma_sphere: ((1+alpha) R(j), (alpha-1) R(j))"""
    first = (1 + alpha) * np.array([-math.sin(t * (1 + alpha)), math.cos(t * (1 + alpha)), 0.0])
    second = (alpha - 1) * np.array([-math.sin(t * (alpha - 1)), math.cos(t * (alpha - 1)), 0.0])
    return first, second


def fiber_membership_sphere(alpha, at, velocity, tol=None):
    """Whether (X, Y) tangent at (x, y) is ((1+alpha)z, (1-alpha)w) with unit z, w"""
    tol = tolerance('validate') if tol is None else tol
    first, second = (np.asarray(v, dtype=float).reshape(3) for v in velocity)
    if abs(np.dot(first, at.x)) > tol or abs(np.dot(second, at.y)) > tol:
        raise InvalidInput('velocity components must be tangent to S^2 at (x, y)')
    return bool(
        abs(np.linalg.norm(first) - abs(1 + alpha)) <= tol
        and abs(np.linalg.norm(second) - abs(1 - alpha)) <= tol
    )


class HopfKind(str, Enum):
    LEFT = 'left-hopf'
    RIGHT = 'right-hopf'
    BOTH = 'both'
    NONE = 'not-hopf'


class HopfClassification(NamedTuple):
    kind: HopfKind
    left: Optional[np.ndarray]
    right: Optional[np.ndarray]


def _constant_factor(factors, threshold):
    mean = np.mean(factors, axis=0)
    norm = np.linalg.norm(mean)
    if norm == 0.0:
        return None
    mean /= norm
    deviation = float(np.max(np.linalg.norm(factors - mean, axis=1)))
    return mean if deviation <= threshold else None


def hopf_classify(circles, threshold=None):
    circles = list(circles)
    if not circles:
        raise InvalidInput('cannot classify an empty family of circles')
    threshold = tolerance('hopf') if threshold is None else threshold
    images = [phi_map(c) for c in circles]
    left = _constant_factor(np.array([img.x for img in images]), threshold)
    right = _constant_factor(np.array([img.y for img in images]), threshold)
    if right is not None and hopf_right_reversed():
        right = -right
    if left is not None and right is not None:
        kind = HopfKind.BOTH
    elif left is not None:
        kind = HopfKind.LEFT
    elif right is not None:
        kind = HopfKind.RIGHT
    else:
        kind = HopfKind.NONE
    logger.debug('classified %d circles as %s', len(circles), kind.value)
    return HopfClassification(kind, left, right)
