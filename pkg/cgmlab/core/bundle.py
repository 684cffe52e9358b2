"""Tangent and unit tangent bundles of S^2(c) / H^2(c) with the metrics h_{m,r}.

A point of TM is a pair (x, e); a tangent vector X^h + Y^v at (x, e) is kept
already split as the pair (X, Y). Raw curve derivatives (xdot, edot) enter
only through the connection map.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from cgmlab.config import CONNECTION_STENCIL_STEP, TANGENT_TOL
from cgmlab.core.model_spaces import (
    AmbientVector,
    ModelSpace,
    ambient_dot,
    exp_map,
    frame_fields,
    near_space,
    parallel_transport,
    require_tangent,
    retract,
    sphere3,
    tangent_project,
    transport_between,
)
from cgmlab.errors import DomainError, InvalidInputError
from cgmlab.schemas import FiberSign, SpaceKind

logger = logging.getLogger(__name__)

BundleCurve = Callable[[float], Tuple[AmbientVector, AmbientVector]]


# -------- Domain types --------

@dataclass(frozen=True)
class MetricParams:
    m: float
    r: float
    c: float
    fiber_sign: FiberSign = FiberSign.definite

    def __post_init__(self) -> None:
        if not math.isfinite(self.m):
            raise InvalidInputError(f"m must be finite, got {self.m}")
        if not (self.r >= 0 and math.isfinite(self.r)):
            raise InvalidInputError(f"r must be non-negative, got {self.r}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise InvalidInputError(f"c must be positive, got {self.c}")
        object.__setattr__(self, "fiber_sign", FiberSign(self.fiber_sign))

    @classmethod
    def for_base(cls, base: ModelSpace, m: float, r: float) -> "MetricParams":
        """Definite on S^2(c), indefinite on H^2(c)."""
        if base.kind not in (SpaceKind.sphere2, SpaceKind.hyperbolic_plane):
            raise InvalidInputError(f"bundle base must be 2-dimensional, got {base.kind.value}")
        sign = FiberSign.definite if base.is_sphere else FiberSign.indefinite
        return cls(m=m, r=r, c=base.c, fiber_sign=sign)

    @property
    def sign(self) -> float:
        return 1.0 if self.fiber_sign == FiberSign.definite else -1.0

    def omega(self, e_sq: float) -> float:
        if 1.0 + e_sq <= 0.0:
            raise DomainError(f"1 + <e,e> = {1.0 + e_sq} must be positive")
        return 1.0 / (1.0 + e_sq)

    def omega_r(self, e_sq: float) -> float:
        denom = 1.0 + self.r * e_sq
        if denom <= 0.0:
            raise DomainError(f"1 + r<e,e> = {denom} must be positive")
        return 1.0 / denom

    def with_r(self, r: float) -> "MetricParams":
        return MetricParams(self.m, r, self.c, self.fiber_sign)


@dataclass(frozen=True, eq=False)
class BundlePoint:
    base: ModelSpace
    x: AmbientVector
    e: AmbientVector
    unit: bool = False

    def __post_init__(self) -> None:
        if self.base.kind not in (SpaceKind.sphere2, SpaceKind.hyperbolic_plane):
            raise InvalidInputError(f"bundle base must be 2-dimensional, got {self.base.kind.value}")
        if not near_space(self.base, self.x):
            raise InvalidInputError(f"base point {self.x!r} is not on {self.base.kind.value}(c={self.base.c})")
        require_tangent(self.base, self.x, self.e)
        if self.unit and abs(ambient_dot(self.e, self.e) - 1.0) > TANGENT_TOL:
            raise InvalidInputError(f"unit bundle point needs <e,e> = 1, got {ambient_dot(self.e, self.e)}")

    @property
    def e_sq(self) -> float:
        return ambient_dot(self.e, self.e)

    def same_point(self, other: "BundlePoint", atol: float = 1e-12) -> bool:
        if self is other:
            return True
        return (
            self.base == other.base
            and self.x.allclose(other.x, atol)
            and self.e.allclose(other.e, atol)
        )


@dataclass(frozen=True, eq=False)
class BundleTangent:
    at: BundlePoint
    X: AmbientVector
    Y: AmbientVector

    def __post_init__(self) -> None:
        require_tangent(self.at.base, self.at.x, self.X)
        require_tangent(self.at.base, self.at.x, self.Y)

    def _same(self, other: "BundleTangent") -> None:
        if not self.at.same_point(other.at):
            raise InvalidInputError("bundle tangents live at different points")

    def __add__(self, other: "BundleTangent") -> "BundleTangent":
        self._same(other)
        return BundleTangent(self.at, self.X + other.X, self.Y + other.Y)

    def __sub__(self, other: "BundleTangent") -> "BundleTangent":
        self._same(other)
        return BundleTangent(self.at, self.X - other.X, self.Y - other.Y)

    def __mul__(self, scalar: float) -> "BundleTangent":
        return BundleTangent(self.at, self.X * scalar, self.Y * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "BundleTangent":
        return BundleTangent(self.at, -self.X, -self.Y)

    def components(self) -> np.ndarray:
        """(X, Y) stacked into one ambient array."""
        return np.concatenate([self.X.components, self.Y.components])

    def max_abs_diff(self, other: "BundleTangent") -> float:
        self._same(other)
        return float(np.max(np.abs(self.components() - other.components())))

    def is_unit_tangent(self, tol: float = TANGENT_TOL) -> bool:
        """Tangent to T^1M: <Y, e> = 0."""
        return abs(ambient_dot(self.Y, self.at.e)) <= tol


@dataclass(frozen=True, eq=False)
class CurveDatum:
    """Derivative at t = 0 of a curve t -> (x(t), e(t)) in TM, in ambient coordinates."""

    xdot: AmbientVector
    edot: AmbientVector


# -------- Lifts --------

def horizontal_lift(bp: BundlePoint, X: AmbientVector) -> BundleTangent:
    return BundleTangent(bp, X, bp.base.zero())


def vertical_lift(bp: BundlePoint, Y: AmbientVector) -> BundleTangent:
    return BundleTangent(bp, bp.base.zero(), Y)


def canonical_vertical_U(bp: BundlePoint) -> BundleTangent:
    return vertical_lift(bp, bp.e)


def horizontal_curve(bp: BundlePoint, X: AmbientVector) -> BundleCurve:
    """Geodesic in direction X carrying e by parallel transport."""
    require_tangent(bp.base, bp.x, X)
    speed = math.sqrt(max(ambient_dot(X, X), 0.0))
    if speed == 0.0:
        return lambda t: (bp.x, bp.e)
    direction = X / speed

    def curve(t: float) -> Tuple[AmbientVector, AmbientVector]:
        s = t * speed
        x_t = exp_map(bp.base, bp.x, X * t)
        return x_t, parallel_transport(bp.base, bp.x, direction, bp.e, s)

    return curve


def vertical_curve(bp: BundlePoint, Y: AmbientVector) -> BundleCurve:
    require_tangent(bp.base, bp.x, Y)
    return lambda t: (bp.x, bp.e + Y * t)


def datum_curve(bp: BundlePoint, datum: CurveDatum) -> BundleCurve:
    """Straight ambient curve with the given derivative, pulled back onto TM."""

    def curve(t: float) -> Tuple[AmbientVector, AmbientVector]:
        x_t = retract(bp.base, bp.x + datum.xdot * t)
        return x_t, tangent_project(bp.base, x_t, bp.e + datum.edot * t)

    return curve


# -------- Connection map --------

def five_point(values: Sequence[np.ndarray], step: float) -> np.ndarray:
    """Derivative at 0 from samples at (-2h, -h, h, 2h)."""
    m2, m1, p1, p2 = values
    return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * step)


def connection_map_closed(bp: BundlePoint, xdot: AmbientVector, edot: AmbientVector) -> AmbientVector:
    """K for an embedded model space: the tangential part of edot."""
    require_tangent(bp.base, bp.x, xdot)
    return tangent_project(bp.base, bp.x, edot)


def lift_pair(bp: BundlePoint, datum: CurveDatum) -> BundleTangent:
    """Split a raw derivative pair into (X, Y) with the closed-form connection map."""
    return BundleTangent(bp, datum.xdot, connection_map_closed(bp, datum.xdot, datum.edot))


def connection_split(
    bp: BundlePoint, curve: BundleCurve, step: float = CONNECTION_STENCIL_STEP
) -> Tuple[AmbientVector, AmbientVector]:
    """Split a curve derivative into (d pi(Z), K(Z)) from the definition of K.

    K(Z) is the derivative of exp_x(tau(e(t)) - e), where tau carries e(t) back
    from x(t) to x along the geodesic arc.
    """
    x0, e0 = curve(0.0)
    if not (x0.allclose(bp.x, 1e-9) and e0.allclose(bp.e, 1e-9)):
        raise InvalidInputError("curve does not pass through the bundle point")

    base = bp.base
    xs, ks = [], []
    for t in (-2.0 * step, -step, step, 2.0 * step):
        x_t, e_t = curve(t)
        back = transport_between(base, x_t, bp.x, e_t)
        w = tangent_project(base, bp.x, back - bp.e)
        xs.append(x_t.components)
        ks.append(exp_map(base, bp.x, w).components)

    X = base.vector(five_point(xs, step))
    Y = base.vector(five_point(ks, step))
    return tangent_project(base, bp.x, X), tangent_project(base, bp.x, Y)


def connection_split_datum(
    bp: BundlePoint, datum: CurveDatum, step: float = CONNECTION_STENCIL_STEP
) -> Tuple[AmbientVector, AmbientVector]:
    return connection_split(bp, datum_curve(bp, datum), step)


# -------- Metrics --------

def _require_compatible(params: MetricParams, bp: BundlePoint) -> None:
    if params.fiber_sign == FiberSign.indefinite and bp.base.is_sphere:
        raise InvalidInputError("the indefinite metric lives over the hyperbolic plane only")
    if not math.isclose(params.c, bp.base.c, rel_tol=1e-12):
        raise InvalidInputError(
            f"metric parameters are for c={params.c} but the bundle point lies over c={bp.base.c}"
        )


def metric_h(params: MetricParams, Z1: BundleTangent, Z2: BundleTangent) -> float:
    """h_{m,r}: horizontal block <X1,X2>, vertical block +-omega^m(<Y1,Y2> + r<Y1,e><Y2,e>)."""
    if not Z1.at.same_point(Z2.at):
        raise InvalidInputError("metric_h needs tangents at the same bundle point")
    bp = Z1.at
    _require_compatible(params, bp)
    e_sq = bp.e_sq
    horizontal = ambient_dot(Z1.X, Z2.X)
    fiber = ambient_dot(Z1.Y, Z2.Y) + params.r * ambient_dot(Z1.Y, bp.e) * ambient_dot(Z2.Y, bp.e)
    return horizontal + params.sign * params.omega(e_sq) ** params.m * fiber


def unit_bundle_gram(params: MetricParams, tangents: Sequence[BundleTangent]) -> np.ndarray:
    """h_{m,r} Gram matrix of tangents sharing one bundle point, as one matrix product."""
    if not tangents:
        raise InvalidInputError("unit_bundle_gram needs at least one tangent")
    bp = tangents[0].at
    for Z in tangents[1:]:
        if not bp.same_point(Z.at):
            raise InvalidInputError("unit_bundle_gram needs tangents at the same bundle point")
    _require_compatible(params, bp)
    J = bp.base.signature.diag
    X = np.array([Z.X.components for Z in tangents])
    Y = np.array([Z.Y.components for Z in tangents])
    along_e = Y @ (J * bp.e.components)
    fiber = (Y * J) @ Y.T + params.r * np.outer(along_e, along_e)
    return (X * J) @ X.T + params.sign * params.omega(bp.e_sq) ** params.m * fiber


def berger_metric(eps: float, x: AmbientVector, V: AmbientVector, W: AmbientVector) -> float:
    """g_eps on the unit S^3: {X1, X2, eps X3} orthonormal."""
    if not eps > 0:
        raise InvalidInputError(f"epsilon must be positive, got {eps}")
    space = sphere3(1.0)
    fp = frame_fields(space, x)
    require_tangent(space, x, V)
    require_tangent(space, x, W)
    v = fp.coefficients(V)
    w = fp.coefficients(W)
    return float(v[0] * w[0] + v[1] * w[1] + v[2] * w[2] / eps ** 2)


def berger_frame_gram(eps: float) -> np.ndarray:
    if not eps > 0:
        raise InvalidInputError(f"epsilon must be positive, got {eps}")
    return np.diag([1.0, 1.0, 1.0 / eps ** 2])
