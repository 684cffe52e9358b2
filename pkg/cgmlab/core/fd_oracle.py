"""Chart-based tensor calculus by central finite differences.

Metric components come from the chart alone (ambient scalar products of
coordinate vectors, or h_{m,r} on coordinate vectors split by the
definition-level connection map), never from closed-form Christoffel symbols,
so every closed form elsewhere in the package can be checked against it.

Index conventions: dg[l, i, j] = d_l g_ij, Gamma[k, i, j] = Gamma^k_ij,
R[l, i, j, k] = R^l_ijk with R(d_i, d_j) d_k = R^l_ijk d_l.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from cgmlab.config import (
    BOUNDARY_MARGIN,
    CONNECTION_STENCIL_STEP,
    DEGENERATE_PLANE_TOL,
    FIRST_DERIVATIVE_STEP,
    ORACLE_STENCIL_STEP,
    SINGULAR_METRIC_TOL,
    SYMMETRY_TOL,
)
from cgmlab.core.bundle import (
    BundleTangent,
    CurveDatum,
    MetricParams,
    connection_split,
    five_point,
    horizontal_lift,
    metric_h,
    vertical_lift,
)
from cgmlab.core.charts import (
    Chart,
    frame_adapted_chart,
    mapped_chart,
    stereographic_chart,
    tangent_bundle_chart,
    unit_bundle_chart,
)
from cgmlab.core.curvature import plane_vectors
from cgmlab.core.lie_bridge import covering_F, source_space
from cgmlab.core.model_spaces import (
    AmbientVector,
    ModelSpace,
    ambient_dot,
    frame_fields,
    retract,
    sphere2,
    transport_between,
)
from cgmlab.errors import DomainError, InvalidInputError
from cgmlab.schemas import ChartKind, FDConfig, LiftCase, PlaneKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MetricField:
    chart: Chart
    eval: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    @property
    def dim(self) -> int:
        return self.chart.dim


# -------- Coordinate vectors --------

def coordinate_vectors(chart: Chart, u: Sequence[float], step: float = CONNECTION_STENCIL_STEP) -> List[AmbientVector]:
    """d_i embed(u) for an ambient chart (analytic when the chart provides them)."""
    u = np.asarray(u, dtype=float)
    if chart.tangents is not None:
        return chart.tangents(u)
    vectors = []
    for i in range(chart.dim):
        shift = np.zeros(chart.dim)
        shift[i] = step
        samples = [chart.point(u + k * shift).components for k in (-2.0, -1.0, 1.0, 2.0)]
        vectors.append(AmbientVector(five_point(samples, step), chart.point(u).signature))
    return vectors


def coordinate_tangents(chart: Chart, u: Sequence[float], step: float = CONNECTION_STENCIL_STEP) -> List[BundleTangent]:
    """Coordinate vectors of a bundle chart, split into (X, Y) by connection_split."""
    if chart.kind != ChartKind.bundle:
        raise InvalidInputError(f"{chart.name} is not a bundle chart")
    u = np.asarray(u, dtype=float)
    bp = chart.bundle_point(u)
    tangents = []
    for i in range(chart.dim):
        direction = np.zeros(chart.dim)
        direction[i] = 1.0
        X, Y = connection_split(bp, lambda t, d=direction: chart.point(u + t * d), step)
        tangents.append(BundleTangent(bp, X, Y))
    return tangents


def lift_coordinates(
    chart: Chart, u: Sequence[float], tangent: BundleTangent, step: float = CONNECTION_STENCIL_STEP
) -> np.ndarray:
    """Coordinates a^i with tangent = sum a^i d_i, by least squares on the split vectors."""
    basis = coordinate_tangents(chart, u, step)
    A = np.column_stack([t.components() for t in basis])
    coeffs, *_ = np.linalg.lstsq(A, tangent.components(), rcond=None)
    residual = float(np.max(np.abs(A @ coeffs - tangent.components())))
    if residual > 1e-8 * max(1.0, float(np.max(np.abs(tangent.components())))):
        raise InvalidInputError(f"tangent is not in the span of the {chart.name} coordinate vectors")
    return coeffs


# -------- Metric fields --------

def _symmetrized(g: np.ndarray) -> np.ndarray:
    return (g + g.T) / 2.0


def ambient_metric_field(chart: Chart) -> MetricField:
    """Pullback of the ambient scalar product."""
    if chart.kind != ChartKind.ambient:
        raise InvalidInputError(f"{chart.name} is not an ambient chart")

    def evaluate(u: np.ndarray) -> np.ndarray:
        vecs = coordinate_vectors(chart, u)
        return np.array([[ambient_dot(a, b) for b in vecs] for a in vecs])

    return MetricField(chart, evaluate, f"ambient[{chart.name}]")


def conformal_metric_field(space: ModelSpace) -> MetricField:
    """Analytic stereographic metric 4 / (c (1 + kappa |u|^2)^2) delta."""
    chart = stereographic_chart(space)

    def evaluate(u: np.ndarray) -> np.ndarray:
        s = 1.0 + space.kappa * float(np.dot(u, u))
        return 4.0 / (space.c * s * s) * np.eye(2)

    return MetricField(chart, evaluate, f"conformal[{space.kind.value}]")


def conformal_christoffel(space: ModelSpace, u: Sequence[float]) -> np.ndarray:
    """Exact Christoffels of conformal_metric_field, for cross-checks."""
    u = np.asarray(u, dtype=float)
    s = 1.0 + space.kappa * float(np.dot(u, u))
    dphi = -2.0 * space.kappa * u / s
    delta = np.eye(2)
    return (
        np.einsum("ki,j->kij", delta, dphi)
        + np.einsum("kj,i->kij", delta, dphi)
        - np.einsum("ij,k->kij", delta, dphi)
    )


def berger_metric_field(chart: Chart, eps: float) -> MetricField:
    """g_eps = sum_k a_k <d_i x, X_k><d_j x, X_k> with a = (1, 1, 1/eps^2)."""
    if not eps > 0:
        raise InvalidInputError(f"epsilon must be positive, got {eps}")
    weights = np.array([1.0, 1.0, 1.0 / eps ** 2])

    def evaluate(u: np.ndarray) -> np.ndarray:
        x = chart.point(u)
        frame = frame_fields(chart.space, x).frame
        vecs = coordinate_vectors(chart, u)
        P = np.array([[ambient_dot(v, X) for v in vecs] for X in frame])
        return _symmetrized(P.T @ np.diag(weights) @ P)

    return MetricField(chart, evaluate, f"berger[eps={eps}]")


def bundle_metric_field(chart: Chart, params: MetricParams, step: float = ORACLE_STENCIL_STEP) -> MetricField:
    """h_{m,r} on the split coordinate vectors of a bundle chart."""

    def evaluate(u: np.ndarray) -> np.ndarray:
        tangents = coordinate_tangents(chart, u, step)
        n = len(tangents)
        g = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = metric_h(params, tangents[i], tangents[j])
        return g

    return MetricField(chart, evaluate, f"h[m={params.m},r={params.r}][{chart.name}]")


# -------- Derivatives --------

def _partial(fn: Callable[[np.ndarray], np.ndarray], u: np.ndarray, direction: np.ndarray, cfg: FDConfig) -> np.ndarray:
    """Central difference along direction; Richardson combines h and h/2."""

    def central(h: float) -> np.ndarray:
        return (fn(u + h * direction) - fn(u - h * direction)) / (2.0 * h)

    if cfg.richardson:
        return (4.0 * central(cfg.step / 2.0) - central(cfg.step)) / 3.0
    return central(cfg.step)


def _unit(dim: int, i: int) -> np.ndarray:
    d = np.zeros(dim)
    d[i] = 1.0
    return d


def metric_components(field: MetricField, u: Sequence[float], cfg: Optional[FDConfig] = None) -> np.ndarray:
    cfg = cfg or FDConfig()
    u = field.chart.require_interior(u, BOUNDARY_MARGIN * cfg.step)
    g = np.asarray(field.eval(u), dtype=float)
    scale = max(1.0, float(np.max(np.abs(g))))
    if float(np.max(np.abs(g - g.T))) > SYMMETRY_TOL * scale:
        raise DomainError(f"{field.name} is not symmetric at {u}")
    return g


def _inverse_metric(field: MetricField, g: np.ndarray, u: np.ndarray) -> np.ndarray:
    det = float(np.linalg.det(g))
    if abs(det) <= SINGULAR_METRIC_TOL:
        raise DomainError(f"{field.name} is singular at {u}: det = {det:.3g}")
    return np.linalg.inv(g)


def christoffel_fd(field: MetricField, u: Sequence[float], cfg: Optional[FDConfig] = None) -> np.ndarray:
    cfg = cfg or FDConfig()
    g = metric_components(field, u, cfg)
    u = np.asarray(u, dtype=float)
    ginv = _inverse_metric(field, g, u)
    n = field.dim
    dg = np.array([_partial(field.eval, u, _unit(n, l), cfg) for l in range(n)])
    # S[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    S = dg + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg)
    gamma = 0.5 * np.einsum("kl,ijl->kij", ginv, S)
    return (gamma + np.einsum("kji->kij", gamma)) / 2.0


def riemann_fd(field: MetricField, u: Sequence[float], cfg: Optional[FDConfig] = None) -> np.ndarray:
    cfg = cfg or FDConfig()
    u = field.chart.require_interior(u, BOUNDARY_MARGIN * cfg.step)
    n = field.dim
    gamma = christoffel_fd(field, u, cfg)
    dgamma = np.array([
        _partial(lambda v: christoffel_fd(field, v, cfg), u, _unit(n, i), cfg) for i in range(n)
    ])
    return (
        np.einsum("iljk->lijk", dgamma)
        - np.einsum("jlik->lijk", dgamma)
        + np.einsum("lim,mjk->lijk", gamma, gamma)
        - np.einsum("ljm,mik->lijk", gamma, gamma)
    )


def lowered(g: np.ndarray, R: np.ndarray) -> np.ndarray:
    """R_pijk = g_pl R^l_ijk."""
    return np.einsum("pl,lijk->pijk", g, R)


def sectional_from_tensor(g: np.ndarray, R: np.ndarray, v: np.ndarray, w: np.ndarray) -> float:
    area = float(v @ g @ v) * float(w @ g @ w) - float(v @ g @ w) ** 2
    if abs(area) <= DEGENERATE_PLANE_TOL:
        raise DomainError(f"degenerate plane: g(v,v)g(w,w) - g(v,w)^2 = {area:.3g}")
    num = float(np.einsum("pijk,i,j,k,p->", lowered(g, R), v, w, w, v))
    return num / area


def sectional_fd(
    field: MetricField, u: Sequence[float], v: Sequence[float], w: Sequence[float], cfg: Optional[FDConfig] = None
) -> float:
    cfg = cfg or FDConfig()
    g = metric_components(field, u, cfg)
    R = riemann_fd(field, u, cfg)
    return sectional_from_tensor(g, R, np.asarray(v, dtype=float), np.asarray(w, dtype=float))


def covariant_derivative_fd(
    field: MetricField,
    u: Sequence[float],
    a: Sequence[float],
    b_of_u: Callable[[np.ndarray], np.ndarray],
    cfg: Optional[FDConfig] = None,
) -> np.ndarray:
    """(nabla_A B)^k = a^i d_i b^k + Gamma^k_ij a^i b^j."""
    cfg = cfg or FDConfig()
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    gamma = christoffel_fd(field, u, cfg)
    derivative = _partial(b_of_u, u, a, cfg)
    return derivative + np.einsum("kij,i,j->k", gamma, a, b_of_u(u))


def first_bianchi_residual(R: np.ndarray) -> float:
    """max |R^l_ijk + R^l_jki + R^l_kij|."""
    total = R + np.einsum("ljki->lijk", R) + np.einsum("lkij->lijk", R)
    return float(np.max(np.abs(total)))


def convergence_order(error_h: float, error_half: float) -> float:
    """Observed order from errors at steps h and h/2."""
    if error_half <= 0.0 or error_h <= 0.0:
        return math.inf
    return math.log2(error_h / error_half)


# -------- Pullbacks --------

def pullback_fd(
    chart: Chart,
    mapping: Callable[[AmbientVector], object],
    target: ModelSpace,
    u: Sequence[float],
    params: Optional[MetricParams] = None,
    cfg: Optional[FDConfig] = None,
) -> np.ndarray:
    """(F^* h)_ij(u) = h(dF d_i, dF d_j).

    A bundle-valued mapping is measured with h_{m,r} (params required); an
    ambient-valued one with the ambient scalar product.
    """
    if params is not None:
        composed = mapped_chart(chart, mapping, target, ChartKind.bundle)
        field = bundle_metric_field(composed, params, CONNECTION_STENCIL_STEP)
    else:
        composed = mapped_chart(chart, mapping, target, ChartKind.ambient)
        field = ambient_metric_field(composed)
    return metric_components(field, u, cfg)


def covering_pullback_gram(p: AmbientVector, c: float, params: MetricParams) -> np.ndarray:
    """Pullback of h_{m,r} under F in the frame {X1, X2, X3} at p."""
    space = source_space(p, c)
    chart = frame_adapted_chart(space, p)
    base = covering_F(p, c).base
    return pullback_fd(chart, lambda q: covering_F(q, c), base, np.zeros(3), params)


def numeric_dF(p: AmbientVector, c: float, V: AmbientVector, step: float = FIRST_DERIVATIVE_STEP) -> CurveDatum:
    """Central difference of covering_F along retract(p + tV)."""
    space = source_space(p, c)
    plus = covering_F(retract(space, p + V * step), c)
    minus = covering_F(retract(space, p - V * step), c)
    return CurveDatum((plus.x - minus.x) / (2.0 * step), (plus.e - minus.e) / (2.0 * step))


# -------- Bundle-chart measurements --------

def _orthogonalized(g: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return b - float(a @ g @ b) / float(a @ g @ a) * a


def random_plane_sectional(
    field: MetricField, u: Sequence[float], rng: np.random.Generator, cfg: Optional[FDConfig] = None
) -> float:
    """Sectional curvature of a Gaussian coordinate plane at u."""
    cfg = cfg or FDConfig()
    g = metric_components(field, u, cfg)
    R = riemann_fd(field, u, cfg)
    a = rng.standard_normal(field.dim)
    b = _orthogonalized(g, a, rng.standard_normal(field.dim))
    return sectional_from_tensor(g, R, a, b)


def _plane_sectionals(
    chart: Chart,
    params: MetricParams,
    u: Sequence[float],
    planes: Sequence[PlaneKind],
    cfg: FDConfig,
) -> Dict[PlaneKind, float]:
    field = bundle_metric_field(chart, params)
    g = metric_components(field, u, cfg)
    R = riemann_fd(field, u, cfg)
    bp = chart.bundle_point(u)
    values: Dict[PlaneKind, float] = {}
    for plane in map(PlaneKind, planes):
        v, w = plane_vectors(bp, plane)
        a = lift_coordinates(chart, u, v, ORACLE_STENCIL_STEP)
        b = lift_coordinates(chart, u, w, ORACLE_STENCIL_STEP)
        values[plane] = sectional_from_tensor(g, R, a, b)
        logger.debug("%s plane %s at u=%s: K=%.12g", chart.name, plane.value, np.asarray(u), values[plane])
    return values


def lift_plane_sectionals(
    params: MetricParams,
    u: Sequence[float],
    planes: Sequence[PlaneKind] = tuple(PlaneKind),
    cfg: Optional[FDConfig] = None,
) -> Dict[PlaneKind, float]:
    """Oracle sectional curvatures of the lift planes on the 4-dim T S^2(c) chart.

    u = (u1, u2, v1, v2) should put a unit vector in the fibre slot.
    """
    return _plane_sectionals(tangent_bundle_chart(sphere2(params.c)), params, u, planes, cfg or FDConfig())


def unit_plane_sectionals(
    params: MetricParams,
    u: Sequence[float],
    planes: Sequence[PlaneKind] = tuple(PlaneKind),
    cfg: Optional[FDConfig] = None,
) -> Dict[PlaneKind, float]:
    """The same planes measured intrinsically on the 3-dim T^1 S^2(c) chart at u = (u1, u2, theta)."""
    return _plane_sectionals(unit_bundle_chart(sphere2(params.c)), params, u, planes, cfg or FDConfig())


def frame_in_chart(chart: Chart, u: Sequence[float]) -> np.ndarray:
    """Columns are X1, X2, X3 at chart.point(u) in the coordinates of a 3-dim ambient chart."""
    vecs = coordinate_vectors(chart, u)
    frame = frame_fields(chart.space, chart.point(u)).frame
    P = np.array([[ambient_dot(v, X) for v in vecs] for X in frame])
    return np.linalg.solve(P, np.eye(3))


def lift_covariant_fd(
    params: MetricParams,
    chart: Chart,
    u: Sequence[float],
    case: LiftCase,
    X: AmbientVector,
    Y: AmbientVector,
    cfg: Optional[FDConfig] = None,
) -> np.ndarray:
    """Chart coordinates of nabla~ of lifted fields at chart.bundle_point(u).

    Y is extended by parallel transport along geodesics from the base point,
    so its covariant derivative vanishes there.
    """
    cfg = cfg or FDConfig()
    case = LiftCase(case)
    u = np.asarray(u, dtype=float)
    bp0 = chart.bundle_point(u)
    lifts = {"h": horizontal_lift, "v": vertical_lift}
    direction, target = lifts[case.value[0]], lifts[case.value[1]]

    def b_of_u(v: np.ndarray) -> np.ndarray:
        bp = chart.bundle_point(v)
        Y_v = transport_between(chart.space, bp0.x, bp.x, Y)
        return lift_coordinates(chart, v, target(bp, Y_v), ORACLE_STENCIL_STEP)

    field = bundle_metric_field(chart, params)
    a = lift_coordinates(chart, u, direction(bp0, X), ORACLE_STENCIL_STEP)
    return covariant_derivative_fd(field, u, a, b_of_u, cfg)
