"""Closed-form curvature of (T S^2(c), h_{m,r}) and of its unit tangent bundle.

Sign convention: R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y], so that the base
satisfies R(X, Y)Z = kappa c (<Y,Z> X - <X,Z> Y) and S^2(c) has curvature +c.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from cgmlab.config import TANGENT_TOL
from cgmlab.core.bundle import (
    BundlePoint,
    BundleTangent,
    MetricParams,
    canonical_vertical_U,
    horizontal_lift,
    metric_h,
    vertical_lift,
)
from cgmlab.core.model_spaces import (
    AmbientVector,
    ModelSpace,
    ambient_dot,
    require_tangent,
    sphere2,
)
from cgmlab.errors import InvalidInputError, UnsupportedError
from cgmlab.schemas import FiberSign, LiftCase, PlaneKind, SpaceKind

logger = logging.getLogger(__name__)


# -------- Base curvature --------

def base_curvature_R(
    space: ModelSpace, x: AmbientVector, X: AmbientVector, Y: AmbientVector, Z: AmbientVector
) -> AmbientVector:
    if space.kind not in (SpaceKind.sphere2, SpaceKind.hyperbolic_plane):
        raise InvalidInputError(f"base_curvature_R needs a 2-dimensional space, got {space.kind.value}")
    for v in (X, Y, Z):
        require_tangent(space, x, v)
    k = space.kappa * space.c
    return (X * ambient_dot(Y, Z) - Y * ambient_dot(X, Z)) * k


# -------- Levi-Civita connection of h_{m,r} --------

def levi_civita_lift(
    params: MetricParams, case: LiftCase, X: AmbientVector, Y: AmbientVector, bp: BundlePoint
) -> BundleTangent:
    """nabla~ of lifted fields at bp, for Y extended with nabla Y = 0 at bp.x.

    hh: nabla~_{X^h} Y^h,  hv: nabla~_{X^h} Y^v,
    vh: nabla~_{X^v} Y^h,  vv: nabla~_{X^v} Y^v.
    """
    try:
        case = LiftCase(case)
    except ValueError:
        raise UnsupportedError(f"unknown lift case {case!r}") from None

    base, x, e = bp.base, bp.x, bp.e
    require_tangent(base, x, X)
    require_tangent(base, x, Y)
    e_sq = bp.e_sq
    zero = base.zero()

    if case == LiftCase.hh:
        return BundleTangent(bp, zero, base_curvature_R(base, x, X, Y, e) * -0.5)

    omega_m = params.omega(e_sq) ** params.m
    if case == LiftCase.hv:
        return BundleTangent(bp, base_curvature_R(base, x, e, Y, X) * (0.5 * params.sign * omega_m), zero)
    if case == LiftCase.vh:
        return BundleTangent(bp, base_curvature_R(base, x, e, X, Y) * (0.5 * params.sign * omega_m), zero)

    m, r = params.m, params.r
    omega = params.omega(e_sq)
    omega_r = params.omega_r(e_sq)
    xe, ye, xy = ambient_dot(X, e), ambient_dot(Y, e), ambient_dot(X, Y)
    vertical = (
        (Y * xe + X * ye) * (-m * omega)
        + e * ((m * omega + r) * omega_r * xy)
        + e * (m * r * omega * omega_r * xe * ye)
    )
    return BundleTangent(bp, zero, vertical)


# -------- T^1 M as a hypersurface --------

@dataclass(frozen=True, eq=False)
class NormalData:
    alpha: float
    n: BundleTangent


def _require_unit(bp: BundlePoint) -> None:
    if abs(bp.e_sq - 1.0) > TANGENT_TOL:
        raise InvalidInputError(f"unit bundle point needs <e,e> = 1, got {bp.e_sq}")


def normal_alpha(params: MetricParams) -> float:
    return math.sqrt(2.0 ** params.m / (1.0 + params.r))


def normal_field(params: MetricParams, bp: BundlePoint) -> NormalData:
    _require_unit(bp)
    alpha = normal_alpha(params)
    return NormalData(alpha=alpha, n=canonical_vertical_U(bp) * alpha)


def second_fundamental_B(params: MetricParams, Z1: BundleTangent, Z2: BundleTangent) -> float:
    """Coefficient of n in B(Z1, Z2); only the vertical parts contribute."""
    _require_unit(Z1.at)
    if not Z1.at.same_point(Z2.at):
        raise InvalidInputError("second_fundamental_B needs tangents at the same bundle point")
    for Z in (Z1, Z2):
        if not Z.is_unit_tangent():
            raise InvalidInputError(
                f"tangent is not tangent to the unit bundle: <Y,e> = {ambient_dot(Z.Y, Z.at.e)}"
            )
    coeff = normal_alpha(params) * (params.m / 2.0 + params.r) / (1.0 + params.r)
    return coeff * ambient_dot(Z1.Y, Z2.Y)


# -------- Sectional curvatures --------

def _definite_only(params: MetricParams) -> None:
    if params.fiber_sign != FiberSign.definite:
        raise UnsupportedError("closed-form sectional curvatures cover the spherical base only")


def _lift_plane_value(params: MetricParams, plane: PlaneKind) -> float:
    _definite_only(params)
    c, m = params.c, params.m
    mixed = c ** 2 / 2.0 ** (m + 2)
    if PlaneKind(plane) == PlaneKind.hh:
        return c - 3.0 * mixed
    return mixed


def sectional_T1_closed(params: MetricParams, plane: PlaneKind) -> float:
    return _lift_plane_value(params, plane)


def sectional_TS2_closed(params: MetricParams, plane: PlaneKind) -> float:
    """Values on the lift planes in T S^2(c) at a unit fibre point.

    They agree with the unit bundle values because B vanishes on every plane
    carrying a horizontal vector, and do not depend on r for f orthogonal to e.
    """
    return _lift_plane_value(params, plane)


def unit_partner(bp: BundlePoint) -> AmbientVector:
    """Unit f tangent at x with <f, e> = 0, via the (Lorentzian) cross product."""
    base = bp.base
    n = np.cross(bp.x.components, bp.e.components)
    f = base.vector(n * base.signature.diag)
    return f / math.sqrt(abs(ambient_dot(f, f)))


def plane_vectors(bp: BundlePoint, plane: PlaneKind, f: Optional[AmbientVector] = None) -> Tuple[BundleTangent, BundleTangent]:
    if f is None:
        f = unit_partner(bp)
    plane = PlaneKind(plane)
    if plane == PlaneKind.hh:
        return horizontal_lift(bp, bp.e), horizontal_lift(bp, f)
    if plane == PlaneKind.hv_e:
        return horizontal_lift(bp, bp.e), vertical_lift(bp, f)
    return horizontal_lift(bp, f), vertical_lift(bp, f)


def reference_point(c: float) -> BundlePoint:
    """(x, e) = ((0, 0, 1/sqrt(c)), (1, 0, 0)) on T^1 S^2(c)."""
    base = sphere2(c)
    return BundlePoint(base, base.vector((0.0, 0.0, 1.0 / math.sqrt(c))), base.vector((1.0, 0.0, 0.0)), unit=True)


def gauss_sectional(
    params: MetricParams,
    plane: PlaneKind,
    bp: Optional[BundlePoint] = None,
    ambient: Optional[float] = None,
) -> float:
    """K of T^1 S^2(c) from the ambient value and the Gauss equation.

    ambient is the sectional curvature of the plane in T S^2(c) at bp, for
    instance an oracle measurement; the closed form is used when omitted.
    """
    _definite_only(params)
    if bp is None:
        bp = reference_point(params.c)
    _require_unit(bp)
    if ambient is None:
        ambient = sectional_TS2_closed(params, plane)
    v, w = plane_vectors(bp, plane)
    area = metric_h(params, v, v) * metric_h(params, w, w) - metric_h(params, v, w) ** 2
    eps_n = params.sign
    correction = eps_n * (
        second_fundamental_B(params, v, v) * second_fundamental_B(params, w, w)
        - second_fundamental_B(params, v, w) ** 2
    ) / area
    return ambient + correction


def isometric_m(c: float) -> float:
    if not c > 0:
        raise InvalidInputError(f"c must be positive, got {c}")
    return math.log2(c)


def berger_m(eps: float) -> float:
    if not eps > 0:
        raise InvalidInputError(f"epsilon must be positive, got {eps}")
    return math.log2(eps ** 2) + 2.0


def berger_sectional(eps: float) -> Tuple[float, float]:
    """(horizontal plane value, planes containing the fibre)."""
    if not eps > 0:
        raise InvalidInputError(f"epsilon must be positive, got {eps}")
    inv = 1.0 / eps ** 2
    return 4.0 - 3.0 * inv, inv


# -------- Positivity thresholds --------

@dataclass(frozen=True)
class PositivityThresholds:
    sec_threshold: Optional[float]
    scal_threshold: Optional[float]


def _mm(m: float) -> float:
    """m^m / (m-1)^(m-1) with (m-1)^(m-1) -> 1 at m = 1."""
    if m == 1.0:
        return 1.0
    return m ** m / (m - 1.0) ** (m - 1.0)


def positivity_thresholds(m: float, r: float) -> PositivityThresholds:
    if r < 0:
        raise InvalidInputError(f"r must be non-negative, got {r}")
    sec: Optional[float] = None
    scal: Optional[float] = None
    if r == 0:
        if m >= 1:
            sec = 4.0 / 3.0 * _mm(m)
        if 1 <= m <= 2:
            scal = 4.0 * _mm(m)
    elif m == 1:
        sec, scal = 4.0 / 3.0, 4.0
    return PositivityThresholds(sec_threshold=sec, scal_threshold=scal)


def expects_positive_sectional(c: float, m: float, r: float) -> bool:
    threshold = positivity_thresholds(m, r).sec_threshold
    return threshold is not None and 0 < c <= threshold
