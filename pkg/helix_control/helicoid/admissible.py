"""Admissibility tests for alpha-helicoidal motions and the controllability rank."""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .conf import tolerance
from .exceptions import CylindricalRuling, InvalidInput, NonStandardRuling, SingularCotangent, Unsupported
from .lines import act_on_geodesic, euclidean_line, helicoidal_curve
from .spaceform import (
    Curvature,
    Isometry,
    LieAlgebraElement,
    SpacePoint,
    TangentVector,
    cross,
    geodesic_velocity,
    parallel_transport,
    rotation_kappa,
    sin_cos_kappa,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class JacobiData:
    """Initial data of J(s) = cos_k(s)U + sin_k(s)V + (a + s b) sigma'(s)."""

    point: SpacePoint
    direction: TangentVector
    u: TangentVector
    v: TangentVector
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        tol = tolerance('validate')
        if not self.direction.is_unit():
            raise InvalidInput('reference geodesic direction must be unit')
        for name in ('direction', 'u', 'v'):
            vector = getattr(self, name)
            if vector.base.distance_to(self.point) > tol * max(1.0, float(np.max(np.abs(self.point.coords)))):
                raise InvalidInput(f"{name} is not based at the reference point")
        if abs(self.u.inner(self.direction)) > tol or abs(self.v.inner(self.direction)) > tol:
            raise InvalidInput('u and v must be orthogonal to the reference direction')

    @property
    def kappa(self):
        return self.point.kappa


def jacobi_eval(field, s):
    """(J(s), J'(s)) with U, V the parallel translates of u, v"""
    p, sigma = field.point, field.direction
    sn, cs = sin_cos_kappa(field.kappa, s)
    u_s = parallel_transport(p, sigma, field.u, s).vec
    v_s = parallel_transport(p, sigma, field.v, s).vec
    velocity = geodesic_velocity(p, sigma, s)
    value = cs * u_s + sn * v_s + (field.a + s * field.b) * velocity.vec
    derivative = -field.kappa * sn * u_s + cs * v_s + field.b * velocity.vec
    return TangentVector(velocity.base, value), TangentVector(velocity.base, derivative)


def jacobi_residuals(field, alpha):
    """(| |J'(0)| - |alpha| |, max |J'(0) - alpha J(0) x sigma'(0)|)"""
    tol = tolerance('validate')
    if abs(field.b) > tol:
        raise InvalidInput('admissibility is only defined for fields with b = 0')
    value = field.u + field.direction.scaled(field.a)
    derivative = field.v
    if abs(value.inner(derivative)) > tol:
        raise InvalidInput("J(0) and J'(0) must be orthogonal")
    expected = cross(field.point, value, field.direction).scaled(alpha)
    return (
        abs(derivative.norm - abs(alpha)),
        float(np.max(np.abs(derivative.vec - expected.vec))),
    )


def jacobi_admissible(field, alpha, tol=None):
    tol = tolerance('validate') if tol is None else tol
    return max(jacobi_residuals(field, alpha)) <= tol


def helicoid_jacobi_data(frame, step=None):
    """Jacobi field of the variation (s, t) -> g_t sigma(s) by the helicoidal motion, at t = 0.

    The variation field is J(s) = X sigma(s) with X = d/dt g_t at t = 0, so
    J(0) = X p and J'(0) is the tangent part of X sigma'(0).
    """
    step = COARSE_STEP if step is None else step
    generator = derivative(lambda t: frame.motion(t).mat, 0.0, step)
    p, sigma = frame.point, frame.initial_direction
    value = TangentVector.project(p, generator @ p.coords)
    slope = TangentVector.project(p, generator @ sigma.vec)
    a, b = value.inner(sigma), slope.inner(sigma)
    return JacobiData(
        point=p,
        direction=sigma,
        u=value - sigma.scaled(a),
        v=slope - sigma.scaled(b),
        a=a,
        b=b,
    )


def ruled_residuals(beta_dot0, v0, v_dot0, alpha):
    tol = tolerance('validate')
    beta_dot0, v0, v_dot0 = (np.asarray(x, dtype=float).reshape(3) for x in (beta_dot0, v0, v_dot0))
    if abs(np.linalg.norm(v0) - 1.0) > tol:
        raise InvalidInput('ruling direction V(0) must be a unit vector')
    if abs(np.dot(beta_dot0, v_dot0)) > tol:
        raise NonStandardRuling()
    return (
        abs(float(np.linalg.norm(v_dot0)) - abs(alpha)),
        float(np.max(np.abs(v_dot0 - alpha * np.cross(beta_dot0, v0)))),
    )


def ruled_admissible(beta_dot0, v0, v_dot0, alpha, tol=None):
    tol = tolerance('validate') if tol is None else tol
    return max(ruled_residuals(beta_dot0, v0, v_dot0, alpha)) <= tol


def helicoid_ruled_data(frame, t=0.0, step=None):
    """Standardized (beta'(t), V(t), V'(t)) of the lines swept by t -> helicoidal_curve(frame, t)"""
    if frame.kappa != Curvature.FLAT:
        raise Unsupported('ruled surfaces are only handled in Euclidean space')
    curve = lru_cache(maxsize=None)(lambda s: helicoidal_curve(frame, s))
    return standardize_ruled(
        lambda s: curve(s).base.spatial,
        lambda s: curve(s).direction.spatial,
        t,
        COARSE_STEP if step is None else step,
    )


class StandardRuling(NamedTuple):
    beta_dot0: np.ndarray
    v0: np.ndarray
    v_dot0: np.ndarray


COARSE_STEP = 1e-3


def _five_point(f, t, h):
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)


def derivative(f, t, h=1e-5):
    """5-point central derivative; Richardson-extrapolated for coarse steps"""
    estimate = _five_point(f, t, h)
    if h >= COARSE_STEP:
        finer = _five_point(f, t, h / 2)
        estimate = finer + (finer - estimate) / 15
    return estimate


def second_derivative(f, t, h=COARSE_STEP):
    return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h)


def standardize_ruled(beta, direction, t0=0.0, step=1e-5, tol=None):
    """Replace beta by the striction line and return its data at t0"""
    tol = tolerance('validate') if tol is None else tol

    def as_array(f):
        return lambda t: np.asarray(f(t), dtype=float)

    beta, raw = as_array(beta), as_array(direction)
    if np.linalg.norm(raw(t0)) == 0.0:
        raise InvalidInput('ruling direction vanishes')

    def direction(t):
        v = raw(t)
        return v / np.linalg.norm(v)

    v0 = direction(t0)
    beta_dot = derivative(beta, t0, step)
    v_dot = derivative(direction, t0, step)
    v_dot = v_dot - np.dot(v_dot, v0) * v0
    speed2 = float(np.dot(v_dot, v_dot))
    if math.sqrt(speed2) <= tol:
        raise CylindricalRuling()
    h2 = max(step, COARSE_STEP)
    beta_ddot = second_derivative(beta, t0, h2)
    v_ddot = second_derivative(direction, t0, h2)
    shift = float(np.dot(beta_dot, v_dot)) / speed2
    shift_dot = (
        (np.dot(beta_ddot, v_dot) + np.dot(beta_dot, v_ddot)) / speed2
        - 2 * shift * np.dot(v_dot, v_ddot) / speed2
    )
    striction_dot = beta_dot - shift * v_dot - shift_dot * v0
    return StandardRuling(striction_dot, v0, v_dot)


def circular_helicoid_surface(r, alpha):
    """(beta, V) of the helicoid whose axis is the circle of radius r"""
    def beta(t):
        return r * np.array([math.cos(t / r), math.sin(t / r), 0.0])

    def direction(t):
        radial = np.array([math.cos(t / r), math.sin(t / r), 0.0])
        return math.cos(alpha * t) * radial + math.sin(alpha * t) * np.array([0.0, 0.0, 1.0])

    return beta, direction


class CircularHelicoidReport(NamedTuple):
    speed: float
    admissible: bool


def circular_helicoid_check(r, alpha):
    if not (math.isfinite(r) and r > 0):
        raise InvalidInput(f"radius must be positive, got {r}")
    if alpha == 0:
        raise InvalidInput('alpha must be nonzero')
    # |V'(0)|^2 = alpha^2 + 1/r^2 exceeds alpha^2 for every finite radius
    return CircularHelicoidReport(math.hypot(alpha, 1.0 / r), False)


@dataclass(frozen=True, eq=False)
class ScrewParams:
    """Screw R_{theta t}T_{lambda t} about the z-axis moving [s -> rho e2 + s(sin eta e1 + cos eta e3)],
    placed in space by frame."""

    theta: float
    lam: float
    rho: float
    eta: float
    frame: Isometry

    def __post_init__(self):
        tol = tolerance('validate')
        if self.rho < -tol:
            raise InvalidInput(f"rho must be non-negative, got {self.rho}")
        if not (-tol <= self.eta <= math.pi + tol):
            raise InvalidInput(f"eta must lie in [0, pi], got {self.eta}")
        if self.frame.kappa != Curvature.FLAT:
            raise InvalidInput('screw frames are Euclidean motions')
        for name in ('theta', 'lam', 'rho', 'eta'):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, 'rho', max(self.rho, 0.0))

    def standard_line(self):
        return euclidean_line(
            [0.0, self.rho, 0.0],
            [math.sin(self.eta), 0.0, math.cos(self.eta)],
        )

    def initial_line(self):
        return act_on_geodesic(self.frame, self.standard_line())

    def screw(self, t):
        return Isometry.translation([0.0, 0.0, self.lam * t]) @ Isometry.rotation_z(self.theta * t)

    def motion(self, t):
        return self.frame @ self.screw(t) @ self.frame.inverse()


def homogeneous_line(params, t):
    return act_on_geodesic(params.frame @ params.screw(t), params.standard_line())


def screw_residuals(params, alpha):
    """(| |theta sin eta| - |alpha| |, |alpha(lambda + rho theta cot eta) - theta|)"""
    if alpha == 0:
        raise InvalidInput('screw admissibility needs alpha != 0')
    sin_eta = math.sin(params.eta)
    if abs(sin_eta) <= tolerance('exact'):
        if abs(params.rho * params.theta) > tolerance('exact'):
            raise SingularCotangent()
        cot_term = 0.0
    else:
        cot_term = params.rho * params.theta * math.cos(params.eta) / sin_eta
    return (
        abs(abs(params.theta * sin_eta) - abs(alpha)),
        abs(alpha * (params.lam + cot_term) - params.theta),
    )


def screw_admissible(params, alpha, tol=None):
    tol = tolerance('validate') if tol is None else tol
    return max(screw_residuals(params, alpha)) <= tol


@dataclass(frozen=True, eq=False)
class FiberVector:
    s: float
    t: float
    value: LieAlgebraElement

    def __post_init__(self):
        if not self.value.in_p():
            raise InvalidInput('fiber vectors must lie in p_kappa')


def fiber_frame(kappa, alpha, s, t):
    """Ad(k(s, t)) xi_alpha: lower-left block R_1(s) a^alpha R_kappa(-t)"""
    kappa = Curvature.coerce(kappa)
    a_alpha = np.array([[0.0, alpha], [1.0, 0.0]])
    block = rotation_kappa(1, s) @ a_alpha @ rotation_kappa(kappa, -t)
    value = LieAlgebraElement.from_blocks(kappa, block[:, 0], block[:, 1])
    return FiberVector(float(s), float(t), value)


def degenerate_direction(kappa, alpha):
    """Z(alpha 1; -alpha 1), orthogonal to every fiber vector when alpha^2 = kappa"""
    return LieAlgebraElement.from_blocks(kappa, (alpha, -alpha), (1.0, 1.0))


def f_zeta(kappa, alpha, zeta, s, t):
    kappa = Curvature.coerce(kappa)
    if zeta.kappa != kappa or not zeta.in_p():
        raise InvalidInput('zeta must be an element of p_kappa for the same curvature')
    return fiber_frame(kappa, alpha, s, t).value.p_inner(zeta)


def _sample_extent(kappa):
    # keeps cosh(t) moderate so the rank threshold stays meaningful
    return 2.0 if kappa == Curvature.HYPERBOLIC else 3.0


def fiber_samples(kappa, alpha, samples, seed):
    """4 x N matrix of fiber vectors in the coordinates (x1, x2, y1, y2)"""
    kappa = Curvature.coerce(kappa)
    draws = np.random.default_rng(seed).random((samples, 2))
    s_values = 2 * math.pi * draws[:, 0]
    t_values = _sample_extent(kappa) * (2 * draws[:, 1] - 1)
    return np.column_stack([
        fiber_frame(kappa, alpha, s, t).value.coordinates
        for s, t in zip(s_values, t_values)
    ])


def substantial_rank(kappa, alpha, samples=128, seed=0, threshold=None):
    if samples < 4:
        raise InvalidInput('substantiality needs at least 4 samples')
    threshold = tolerance('rank') if threshold is None else threshold
    singular = np.linalg.svd(fiber_samples(kappa, alpha, samples, seed), compute_uv=False)
    rank = int(np.sum(singular > threshold))
    logger.debug('rank(kappa=%s, alpha=%s) = %d, singular values %s', kappa, alpha, rank, singular)
    return rank


def isotropy_trivial(kappa, alpha, grid=(20, 20), t_extent=3.0, tol=None):
    """Whether (0, 0) is the only grid solution of R_1(s) a = a R_kappa(t)"""
    kappa = Curvature.coerce(kappa)
    if kappa == Curvature.SPHERICAL:
        raise Unsupported('isotropy triviality is only claimed for kappa in {0, -1}')
    if alpha == 0:
        raise InvalidInput('isotropy triviality needs alpha != 0')
    tol = tolerance('validate') if tol is None else tol
    s_count, t_count = grid
    s_values = 2 * math.pi * np.arange(s_count) / s_count
    half = max(t_count // 2, 1)
    t_values = t_extent * (np.arange(t_count) - t_count // 2) / half
    s, t = np.meshgrid(s_values, t_values, indexing='ij')
    sn_k, cs_k = sin_cos_kappa(kappa, t)
    residual = np.maximum.reduce([
        np.abs(-np.sin(s) - alpha * sn_k),
        np.abs(np.cos(s) - cs_k),
        np.abs(alpha * np.sin(s) + kappa * sn_k),
    ])
    solutions = np.argwhere(residual <= tol)
    trivial = all(s_values[i] == 0.0 and t_values[j] == 0.0 for i, j in solutions)
    logger.debug('isotropy kappa=%s alpha=%s: %d grid solutions', kappa, alpha, len(solutions))
    return bool(trivial and len(solutions) > 0)
