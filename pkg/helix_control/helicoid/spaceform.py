"""Closed-form Riemannian primitives of the space forms M_kappa.

All three space forms live in R^4 with the bilinear form
<x, y>_kappa = kappa*x0*y0 + x1*y1 + x2*y2 + x3*y3:

    kappa = 1   unit sphere S^3
    kappa = 0   the affine hyperplane x0 = 1 (Euclidean space)
    kappa = -1  upper sheet of the hyperboloid <x, x> = -1 (hyperbolic space)

Isometries of the identity component act by 4x4 matrices, so points,
tangent vectors and motions share one code path for every curvature.
"""
import logging
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .conf import hyperbolic_limit, tolerance
from .exceptions import InvalidInput

logger = logging.getLogger(__name__)


class Curvature(IntEnum):
    HYPERBOLIC = -1
    FLAT = 0
    SPHERICAL = 1

    @classmethod
    def coerce(cls, value):
        """Accept -1, 0, 1 (ints or integral floats); anything else is invalid input"""
        if isinstance(value, cls):
            return value
        if isinstance(value, bool):
            raise InvalidInput(f"kappa must be -1, 0 or 1, got {value!r}")
        try:
            as_int = int(value)
            if as_int != value:
                raise ValueError
            return cls(as_int)
        except (TypeError, ValueError):
            raise InvalidInput(f"kappa must be -1, 0 or 1, got {value!r}")


def basis(i):
    e = np.zeros(4)
    e[i] = 1.0
    return e


def metric_matrix(kappa):
    return np.diag([float(kappa), 1.0, 1.0, 1.0])


def metric_inner(kappa, x, y):
    """<x, y>_kappa"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(kappa * x[0] * y[0] + np.dot(x[1:], y[1:]))


def _check_hyperbolic_range(r):
    limit = hyperbolic_limit()
    if np.any(np.abs(r) > limit):
        raise InvalidInput(f"hyperbolic arclength {r} exceeds the supported range |s| <= {limit}")


def sin_cos_kappa(kappa, r):
    """(sin_kappa r, cos_kappa r); works elementwise on arrays"""
    kappa = Curvature.coerce(kappa)
    if kappa == Curvature.SPHERICAL:
        return np.sin(r), np.cos(r)
    if kappa == Curvature.FLAT:
        if np.ndim(r):
            return np.asarray(r, dtype=float), np.ones(np.shape(r))
        return float(r), 1.0
    _check_hyperbolic_range(r)
    return np.sinh(r), np.cosh(r)


def rotation_kappa(kappa, t):
    """R_kappa(t) = [[cos_k t, -k sin_k t], [sin_k t, cos_k t]], a one-parameter group"""
    sn, cs = sin_cos_kappa(kappa, t)
    return np.array([[cs, -kappa * sn], [sn, cs]], dtype=float)


def _frozen(values, shape):
    try:
        arr = np.array(values, dtype=float).reshape(shape)
    except (TypeError, ValueError):
        raise InvalidInput(f"expected a real array of shape {shape}, got {values!r}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"non-finite entries in {arr.tolist()}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpacePoint:
    """A point of M_kappa in embedded coordinates (x0, x1, x2, x3)."""

    kappa: Curvature
    coords: np.ndarray

    def __post_init__(self):
        kappa = Curvature.coerce(self.kappa)
        coords = _frozen(self.coords, (4,))
        tol = tolerance('validate')
        if kappa == Curvature.FLAT:
            if abs(coords[0] - 1.0) > tol:
                raise InvalidInput(f"flat points need x0 = 1, got {coords.tolist()}")
            if coords[0] != 1.0:
                coords = np.array(coords)
                coords[0] = 1.0
                coords.setflags(write=False)
        else:
            scale = max(1.0, float(np.dot(coords, coords)))
            if abs(metric_inner(kappa, coords, coords) - kappa) > tol * scale:
                raise InvalidInput(f"{coords.tolist()} is not on the space form of curvature {int(kappa)}")
            if kappa == Curvature.HYPERBOLIC and coords[0] <= 0:
                raise InvalidInput(f"{coords.tolist()} is on the lower sheet of the hyperboloid")
        object.__setattr__(self, 'kappa', kappa)
        object.__setattr__(self, 'coords', coords)

    @classmethod
    def origin(cls, kappa):
        return cls(kappa, basis(0))

    @classmethod
    def from_spatial(cls, xyz):
        return cls(Curvature.FLAT, np.concatenate([[1.0], np.asarray(xyz, dtype=float)]))

    @property
    def spatial(self):
        return self.coords[1:]

    def renormalized(self):
        """Project back onto the constraint set after long compositions"""
        coords = np.array(self.coords)
        if self.kappa == Curvature.FLAT:
            coords[0] = 1.0
        else:
            coords = coords / np.sqrt(self.kappa * metric_inner(self.kappa, coords, coords))
        return SpacePoint(self.kappa, coords)

    def distance_to(self, other):
        return float(np.max(np.abs(self.coords - other.coords)))

    def __repr__(self):
        return f"SpacePoint(kappa={int(self.kappa)}, coords={self.coords.tolist()})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector at base, also in embedded coordinates."""

    base: SpacePoint
    vec: np.ndarray

    def __post_init__(self):
        vec = _frozen(self.vec, (4,))
        tol = tolerance('validate')
        kappa = self.base.kappa
        if kappa == Curvature.FLAT:
            if abs(vec[0]) > tol:
                raise InvalidInput(f"flat tangent vectors need vec0 = 0, got {vec.tolist()}")
            if vec[0] != 0.0:
                vec = np.array(vec)
                vec[0] = 0.0
                vec.setflags(write=False)
        else:
            scale = max(1.0, float(np.linalg.norm(vec) * np.linalg.norm(self.base.coords)))
            if abs(metric_inner(kappa, self.base.coords, vec)) > tol * scale:
                raise InvalidInput(f"{vec.tolist()} is not tangent at {self.base.coords.tolist()}")
        object.__setattr__(self, 'vec', vec)

    @property
    def kappa(self):
        return self.base.kappa

    @property
    def spatial(self):
        return self.vec[1:]

    @property
    def norm(self):
        return float(np.sqrt(max(metric_inner(self.kappa, self.vec, self.vec), 0.0)))

    def inner(self, other):
        return metric_inner(self.kappa, self.vec, other.vec)

    def is_unit(self, tol=None):
        tol = tolerance('validate') if tol is None else tol
        return abs(self.norm - 1.0) <= tol

    def scaled(self, factor):
        return TangentVector(self.base, factor * self.vec)

    def __neg__(self):
        return self.scaled(-1.0)

    def __add__(self, other):
        return TangentVector(self.base, self.vec + other.vec)

    def __sub__(self, other):
        return TangentVector(self.base, self.vec - other.vec)

    def unit(self):
        norm = self.norm
        if norm == 0.0:
            raise InvalidInput('cannot normalize the zero vector')
        return self.scaled(1.0 / norm)

    @classmethod
    def project(cls, base, vec):
        """Tangent part of an ambient vector at base"""
        vec = np.array(vec, dtype=float).reshape(4)
        if base.kappa == Curvature.FLAT:
            vec[0] = 0.0
        else:
            p = base.coords
            vec = vec - metric_inner(base.kappa, vec, p) / metric_inner(base.kappa, p, p) * p
        return cls(base, vec)

    def renormalized(self):
        """Gram-Schmidt against the base point"""
        return TangentVector.project(self.base.renormalized(), self.vec)

    def __repr__(self):
        return f"TangentVector(base={self.base.coords.tolist()}, vec={self.vec.tolist()})"


def _isometry_defect(kappa, mat):
    """Largest violation of the group conditions, relative to the entry scale"""
    scale = max(1.0, float(np.max(np.abs(mat))) ** 2)
    if kappa == Curvature.FLAT:
        rot = mat[1:, 1:]
        defects = [
            np.max(np.abs(mat[0] - basis(0))),
            np.max(np.abs(rot.T @ rot - np.eye(3))),
            abs(np.linalg.det(rot) - 1.0),
        ]
        return float(max(defects))
    gram = metric_matrix(kappa)
    defects = [
        np.max(np.abs(mat.T @ gram @ mat - gram)) / scale,
        abs(np.linalg.det(mat) - 1.0) / scale ** 2,
    ]
    if kappa == Curvature.HYPERBOLIC and mat[0, 0] <= 0:
        return float('inf')
    return float(max(defects))


@dataclass(frozen=True, eq=False)
class Isometry:
    """An element of the identity component G_kappa acting by matrix product."""

    kappa: Curvature
    mat: np.ndarray

    def __post_init__(self):
        kappa = Curvature.coerce(self.kappa)
        mat = _frozen(self.mat, (4, 4))
        defect = _isometry_defect(kappa, mat)
        if defect > tolerance('validate'):
            raise InvalidInput(f"matrix is not an orientation-preserving isometry for kappa={int(kappa)} (defect {defect:.3g})")
        if kappa == Curvature.FLAT and not np.array_equal(mat[0], basis(0)):
            mat = np.array(mat)
            mat[0] = basis(0)
            mat.setflags(write=False)
        object.__setattr__(self, 'kappa', kappa)
        object.__setattr__(self, 'mat', mat)

    @classmethod
    def identity(cls, kappa):
        return cls(kappa, np.eye(4))

    @classmethod
    def rigid(cls, rotation, translation):
        """Flat motion x -> rotation @ x + translation"""
        mat = np.eye(4)
        mat[1:, 1:] = rotation
        mat[1:, 0] = translation
        return cls(Curvature.FLAT, mat)

    @classmethod
    def translation(cls, vector):
        return cls.rigid(np.eye(3), vector)

    @classmethod
    def rotation_z(cls, angle):
        c, s = np.cos(angle), np.sin(angle)
        return cls.rigid(np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]), np.zeros(3))

    @classmethod
    def from_frame(cls, point, f1, f2, f3):
        """The isometry sending e0 to point and e1, e2, e3 to the given frame"""
        mat = np.column_stack([point.coords, f1.vec, f2.vec, f3.vec])
        return cls(point.kappa, mat)

    def inverse(self):
        if self.kappa == Curvature.FLAT:
            rot = self.mat[1:, 1:]
            return Isometry.rigid(rot.T, -rot.T @ self.mat[1:, 0])
        gram = metric_matrix(self.kappa)
        # gram is its own inverse for kappa = +-1
        return Isometry(self.kappa, gram @ self.mat.T @ gram)

    def __matmul__(self, other):
        if isinstance(other, Isometry):
            if other.kappa != self.kappa:
                raise InvalidInput('cannot compose isometries of different curvature')
            return Isometry(self.kappa, self.mat @ other.mat)
        return apply_isometry(self, other)

    def __repr__(self):
        return f"Isometry(kappa={int(self.kappa)}, mat={self.mat.tolist()})"


@dataclass(frozen=True, eq=False)
class LieAlgebraElement:
    """A 4x4 element of the Lie algebra of G_kappa.

    Elements of the complement p_kappa have the block form Z(x, y): lower-left
    block with columns x and y, upper-right block with rows -kappa*x and -y,
    zero diagonal blocks.
    """

    kappa: Curvature
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'kappa', Curvature.coerce(self.kappa))
        object.__setattr__(self, 'mat', _frozen(self.mat, (4, 4)))

    @classmethod
    def from_blocks(cls, kappa, x, y):
        """Z(x, y)"""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        mat = np.zeros((4, 4))
        mat[2:4, 0] = x
        mat[2:4, 1] = y
        mat[0, 2:4] = -kappa * x
        mat[1, 2:4] = -y
        return cls(kappa, mat)

    @property
    def lower_left(self):
        return self.mat[2:4, 0:2]

    @property
    def x_block(self):
        return self.mat[2:4, 0]

    @property
    def y_block(self):
        return self.mat[2:4, 1]

    @property
    def coordinates(self):
        """(x1, x2, y1, y2)"""
        return np.concatenate([self.x_block, self.y_block])

    def in_p(self, tol=None):
        tol = tolerance('validate') if tol is None else tol
        expected = LieAlgebraElement.from_blocks(self.kappa, self.x_block, self.y_block)
        return bool(np.max(np.abs(self.mat - expected.mat)) <= tol * max(1.0, float(np.max(np.abs(self.mat)))))

    def p_inner(self, other):
        """<Z(X,Y), Z(U,V)> = <X,U> + <Y,V>"""
        return float(np.sum(self.lower_left * other.lower_left))

    def conjugated(self, g):
        """Ad(g) of this element"""
        return LieAlgebraElement(self.kappa, g.mat @ self.mat @ g.inverse().mat)

    def __neg__(self):
        return LieAlgebraElement(self.kappa, -self.mat)


def _require_unit_at(p, v):
    if v.base.distance_to(p) > tolerance('validate') * max(1.0, float(np.max(np.abs(p.coords)))):
        raise InvalidInput('direction vector is not based at the given point')
    if not v.is_unit():
        raise InvalidInput(f"direction must be a unit vector, got norm {v.norm}")


def geodesic_point(p, v, s):
    """gamma_v(s) = cos_k(s) p + sin_k(s) v"""
    _require_unit_at(p, v)
    sn, cs = sin_cos_kappa(p.kappa, s)
    if p.kappa == Curvature.FLAT:
        return SpacePoint.from_spatial(p.spatial + s * v.spatial)
    return SpacePoint(p.kappa, cs * p.coords + sn * v.vec)


def geodesic_velocity(p, v, s):
    """gamma_v'(s) = -kappa sin_k(s) p + cos_k(s) v"""
    point = geodesic_point(p, v, s)
    sn, cs = sin_cos_kappa(p.kappa, s)
    if p.kappa == Curvature.FLAT:
        return TangentVector(point, v.vec)
    return TangentVector(point, -p.kappa * sn * p.coords + cs * v.vec)


def parallel_transport(p, v, w, s):
    """Transport w along gamma_v to gamma_v(s)"""
    _require_unit_at(p, v)
    if w.base.distance_to(p) > tolerance('validate') * max(1.0, float(np.max(np.abs(p.coords)))):
        raise InvalidInput('transported vector is not based at the given point')
    along = metric_inner(p.kappa, w.vec, v.vec)
    normal = w.vec - along * v.vec
    velocity = geodesic_velocity(p, v, s)
    return TangentVector(velocity.base, along * velocity.vec + normal)


def cross(p, u, v):
    """Cross product in T_pM: for orthonormal u, v the unit w with det(p, u, v, w) > 0"""
    if p.kappa == Curvature.FLAT:
        return TangentVector(p, np.concatenate([[0.0], np.cross(u.spatial, v.spatial)]))
    rows = np.vstack([p.coords, u.vec, v.vec])
    # cofactors of det(p, u, v, x) along x, so that c . x = det(p, u, v, x)
    cofactors = np.array([
        (-1) ** (3 + i) * np.linalg.det(np.delete(rows, i, axis=1))
        for i in range(4)
    ])
    w = cofactors.copy()
    w[0] = cofactors[0] / p.kappa
    return TangentVector(p, w)


def screw_exponential(kappa, alpha, t):
    """S_t = exp(t xi_alpha): R_kappa(t) on (e0, e3), rotation by alpha*t on (e1, e2)"""
    kappa = Curvature.coerce(kappa)
    sn, cs = sin_cos_kappa(kappa, t)
    mat = np.array([
        [cs, 0.0, 0.0, -kappa * sn],
        [0.0, np.cos(alpha * t), -np.sin(alpha * t), 0.0],
        [0.0, np.sin(alpha * t), np.cos(alpha * t), 0.0],
        [sn, 0.0, 0.0, cs],
    ])
    return Isometry(kappa, mat)


def xi_alpha(kappa, alpha):
    kappa = Curvature.coerce(kappa)
    return LieAlgebraElement.from_blocks(kappa, (0.0, 1.0), (alpha, 0.0))


def isotropy_element(kappa, s, t):
    """k(s, t) = diag(R_kappa(t), R_1(s)), the stabilizer of the standard geodesic"""
    kappa = Curvature.coerce(kappa)
    mat = np.zeros((4, 4))
    mat[0:2, 0:2] = rotation_kappa(kappa, t)
    mat[2:4, 2:4] = rotation_kappa(1, s)
    return Isometry(kappa, mat)


def apply_isometry(g, obj):
    if not isinstance(g, Isometry):
        g = Isometry(obj.kappa, g)
    if g.kappa != obj.kappa:
        raise InvalidInput('isometry and object live in different space forms')
    if isinstance(obj, SpacePoint):
        return SpacePoint(obj.kappa, g.mat @ obj.coords)
    if isinstance(obj, TangentVector):
        return TangentVector(apply_isometry(g, obj.base), g.mat @ obj.vec)
    raise InvalidInput(f"cannot apply an isometry to {type(obj).__name__}")
