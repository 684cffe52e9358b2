"""Covering-map kernels over stacks of sample points.

Points are (n, 4) arrays on S^3(c/4) or H^3_1(c/4); bundle quantities come back
as (n, 3) arrays (or (n, 3, 3) with the frame index second). Each kernel runs
the same formulas as its pointwise counterpart in lie_bridge, bundle or
fd_oracle, component-wise over the leading axis, so a scenario can measure a
thousand points in one pass. Membership is checked once per batch; the rows
produced in between are not revalidated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from cgmlab.config import CONNECTION_STENCIL_STEP, CONTAINS_TOL, EXP_SERIES_BRANCH, FIRST_DERIVATIVE_STEP
from cgmlab.core.bundle import MetricParams, five_point
from cgmlab.core.lie_bridge import lie_basis
from cgmlab.core.model_spaces import ModelSpace
from cgmlab.errors import DomainError, InvalidInputError
from cgmlab.schemas import FiberSign, GroupKind, SpaceKind

_SOURCE_DIAG = {
    GroupKind.su2: np.array([1.0, 1.0, 1.0, 1.0]),
    GroupKind.su11: np.array([1.0, 1.0, -1.0, -1.0]),
}
_BASE_DIAG = {
    GroupKind.su2: np.array([1.0, 1.0, 1.0]),
    GroupKind.su11: np.array([1.0, 1.0, -1.0]),
}
_SIGMA = {
    GroupKind.su2: np.array([1.0, 1.0, 1.0]),
    GroupKind.su11: np.array([1.0, -1.0, -1.0]),
}


def _dot(a: np.ndarray, b: np.ndarray, diag: np.ndarray) -> np.ndarray:
    """Signed scalar product along the last axis."""
    return np.sum(a * b * diag, axis=-1)


@dataclass(frozen=True, eq=False)
class CoveringBatch:
    """Sample points of S^3(c/4) (su2) or H^3_1(c/4) (su11) for the covering map onto T^1 of curvature c."""

    kind: GroupKind
    c: float
    points: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.points, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise InvalidInputError(f"expected an (n, 4) array of points, got shape {arr.shape}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise InvalidInputError(f"c must be positive, got {self.c}")
        object.__setattr__(self, "kind", GroupKind(self.kind))
        q = _dot(arr, arr, _SOURCE_DIAG[self.kind])
        target = self.kappa * 4.0 / self.c
        size = np.maximum(1.0, np.sum(arr * arr, axis=-1))
        if np.any(np.abs(q - target) > CONTAINS_TOL * size):
            raise InvalidInputError(f"some rows are not on the source space of the covering map for c={self.c}")
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @classmethod
    def on(cls, space: ModelSpace, points: np.ndarray) -> "CoveringBatch":
        if space.kind == SpaceKind.sphere3:
            return cls(GroupKind.su2, 4.0 * space.c, points)
        if space.kind == SpaceKind.anti_de_sitter3:
            return cls(GroupKind.su11, 4.0 * space.c, points)
        raise InvalidInputError(f"the covering map starts on Sphere3 or AntiDeSitter3, got {space.kind.value}")

    @property
    def kappa(self) -> float:
        return 1.0 if self.kind == GroupKind.su2 else -1.0

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def antipodes(self) -> "CoveringBatch":
        return CoveringBatch(self.kind, self.c, -self.points)


# -------- Frames and group matrices --------

def frame_arrays(batch: CoveringBatch) -> np.ndarray:
    """X1, X2, X3 at every row, shape (n, 3, 4)."""
    x1, x2, x3, x4 = (batch.points * (math.sqrt(batch.c) / 2.0)).T
    X3 = np.stack([-x2, x1, -x4, x3], axis=-1)
    if batch.kind == GroupKind.su2:
        X2 = np.stack([-x3, x4, x1, -x2], axis=-1)
        X1 = np.stack([-x4, -x3, x2, x1], axis=-1)
    else:
        X2 = np.stack([x3, -x4, x1, -x2], axis=-1)
        X1 = np.stack([x4, x3, x2, x1], axis=-1)
    return np.stack([X1, X2, X3], axis=1)


def _z_pairs(unit: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return unit[:, 0] + 1j * unit[:, 1], unit[:, 2] + 1j * unit[:, 3]


def _psi_matrices(kind: GroupKind, values: np.ndarray) -> np.ndarray:
    """psi as a real-linear map on every row, shape (n, 2, 2)."""
    z1, z2 = _z_pairs(values)
    if kind == GroupKind.su2:
        rows = [[z1, -np.conj(z2)], [z2, np.conj(z1)]]
    else:
        rows = [[1j * np.conj(z2), -1j * z1], [1j * np.conj(z1), -1j * z2]]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def _inverse_matrices(kind: GroupKind, M: np.ndarray) -> np.ndarray:
    a, b = M[:, 0, 0], M[:, 1, 0]
    if kind == GroupKind.su2:
        rows = [[np.conj(a), np.conj(b)], [-b, a]]
    else:
        rows = [[np.conj(a), -np.conj(b)], [-b, a]]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def _lie_coordinates(M: np.ndarray) -> np.ndarray:
    return np.stack([M[..., 1, 0].imag, M[..., 1, 0].real, M[..., 0, 0].imag], axis=-1)


def _lie_matrices(kind: GroupKind, coords: np.ndarray) -> np.ndarray:
    basis = np.stack(lie_basis(kind).as_tuple())
    return np.einsum("ni,ijk->njk", coords.astype(complex), basis)


def _bracket_with(kind: GroupKind, coords: np.ndarray, k: int) -> np.ndarray:
    """[Y, e_k] in Lie coordinates for every row of Y."""
    U = _lie_matrices(kind, coords)
    E = lie_basis(kind).as_tuple()[k]
    return _lie_coordinates(U @ E - E @ U)


def adjoint_arrays(batch: CoveringBatch) -> np.ndarray:
    """(A e1 A^-1 | A e2 A^-1 | A e3 A^-1) per row, shape (n, 3, 3)."""
    unit = batch.points * (math.sqrt(batch.c) / 2.0)
    M = _psi_matrices(batch.kind, unit)
    Minv = _inverse_matrices(batch.kind, M)
    cols = [_lie_coordinates(M @ e @ Minv) for e in lie_basis(batch.kind).as_tuple()]
    return np.stack(cols, axis=-1)


def rho_arrays(batch: CoveringBatch, points: Optional[np.ndarray] = None) -> np.ndarray:
    """Explicit adjoint matrices rho(psi(p)) per row, shape (n, 3, 3)."""
    P = batch.points if points is None else points
    z1, z2 = _z_pairs(P * (math.sqrt(batch.c) / 2.0))
    w = z1 * np.conj(z2)
    p = z1 * z2
    if batch.kind == GroupKind.su2:
        s = z1 ** 2 - np.conj(z2) ** 2
        t = np.conj(z1) ** 2 + z2 ** 2
        rows = [
            [s.real, t.imag, 2.0 * w.real],
            [s.imag, t.real, 2.0 * w.imag],
            [-2.0 * p.real, 2.0 * p.imag, np.abs(z1) ** 2 - np.abs(z2) ** 2],
        ]
    else:
        s = z1 ** 2 + np.conj(z2) ** 2
        t = z1 ** 2 - np.conj(z2) ** 2
        rows = [
            [-s.real, -t.imag, 2.0 * w.real],
            [-s.imag, t.real, 2.0 * w.imag],
            [-2.0 * p.real, -2.0 * p.imag, np.abs(z1) ** 2 + np.abs(z2) ** 2],
        ]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


# -------- Covering map and its differential --------

def covering_arrays(batch: CoveringBatch, points: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """F(p) = (c3 / sqrt(c), c1) per row."""
    R = rho_arrays(batch, points)
    return R[:, :, 2] / math.sqrt(batch.c), R[:, :, 0]


def hopf_arrays(batch: CoveringBatch) -> np.ndarray:
    z1, z2 = _z_pairs(batch.points * (math.sqrt(batch.c) / 2.0))
    w = z1 * np.conj(z2)
    third = np.abs(z1) ** 2 - batch.kappa * np.abs(z2) ** 2
    return np.stack([2.0 * w.real, 2.0 * w.imag, third], axis=-1) / math.sqrt(batch.c)


def _project(x: np.ndarray, w: np.ndarray, diag: np.ndarray) -> np.ndarray:
    """Tangential part of w at x; x may carry one fewer axis than w."""
    if w.ndim > x.ndim:
        x = x[:, None, :]
    return w - x * (_dot(w, x, diag) / _dot(x, x, diag))[..., None]


@dataclass(frozen=True, eq=False)
class TildeArrays:
    """Raw (xdot, edot) of e~1, e~2, e~3 per row, each of shape (n, 3, 3)."""

    x: np.ndarray
    e: np.ndarray
    ad: np.ndarray
    xdot: np.ndarray
    edot: np.ndarray


def tilde_arrays(batch: CoveringBatch) -> TildeArrays:
    x, e = covering_arrays(batch)
    ad = adjoint_arrays(batch)
    ad1, ad2, ad3 = ad[:, :, 0], ad[:, :, 1], ad[:, :, 2]
    s = math.sqrt(batch.c)
    zero = np.zeros_like(ad1)
    fiber_sign = -1.0 if batch.kind == GroupKind.su2 else 1.0
    xdot = np.stack([ad2 * (-2.0 / s), ad1 * (2.0 / s), zero], axis=1)
    edot = np.stack([zero, ad3 * (2.0 * fiber_sign), ad2 * 2.0], axis=1)
    return TildeArrays(x=x, e=e, ad=ad, xdot=xdot, edot=edot)


def split_arrays(
    kind: GroupKind, x: np.ndarray, xdot: np.ndarray, edot: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Closed-form connection map per row: (xdot, tangential part of edot at x)."""
    return xdot, _project(x, edot, _BASE_DIAG[kind])


def lift_arrays(tilde: TildeArrays, kind: GroupKind) -> Tuple[np.ndarray, np.ndarray]:
    """lift_pair of each e~_k."""
    return split_arrays(kind, tilde.x, tilde.xdot, tilde.edot)


def frame_image_arrays(batch: CoveringBatch, tilde: Optional[TildeArrays] = None) -> Tuple[np.ndarray, np.ndarray]:
    """dF_closed(X_k) = (sqrt(c)/2) sigma_k lift(e~_k), as (X, Y) of shape (n, 3, 3)."""
    tilde = tilde or tilde_arrays(batch)
    X, Y = lift_arrays(tilde, batch.kind)
    weights = (math.sqrt(batch.c) / 2.0) * _SIGMA[batch.kind][None, :, None]
    return X * weights, Y * weights


def dF_ambient_arrays(batch: CoveringBatch, V: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """dF_p(V) per row from d rho(A Y) = rho(A) o ad(Y); V has shape (n, 4)."""
    kind = batch.kind
    half = math.sqrt(batch.c) / 2.0
    M = _psi_matrices(kind, batch.points * half)
    Minv = _inverse_matrices(kind, M)
    Y = _lie_coordinates(Minv @ _psi_matrices(kind, V * half))
    ad = adjoint_arrays(batch)
    xdot = np.einsum("nij,nj->ni", ad, _bracket_with(kind, Y, 2)) / math.sqrt(batch.c)
    edot = np.einsum("nij,nj->ni", ad, _bracket_with(kind, Y, 0))
    return xdot, edot


def identity_residuals(batch: CoveringBatch, tilde: Optional[TildeArrays] = None) -> np.ndarray:
    """Per row: (sqrt(c)/2) e~2 - e^h, (sqrt(c)/2) e~1 - f^h, e~3 + 2 f^v with f = -A e2 A^-1."""
    tilde = tilde or tilde_arrays(batch)
    X, Y = lift_arrays(tilde, batch.kind)
    half = math.sqrt(batch.c) / 2.0
    ad1, ad2 = tilde.ad[:, :, 0], tilde.ad[:, :, 1]
    f = -ad2

    def residual(k: int, scale: float, X_ref: np.ndarray, Y_ref: np.ndarray) -> np.ndarray:
        dx = np.max(np.abs(X[:, k] * scale - X_ref), axis=-1)
        dy = np.max(np.abs(Y[:, k] * scale - Y_ref), axis=-1)
        return np.maximum(dx, dy)

    zero = np.zeros_like(f)
    return np.stack(
        [
            residual(1, half, ad1, zero),
            residual(0, half, f, zero),
            residual(2, 1.0, zero, f * -2.0),
        ],
        axis=-1,
    )


# -------- Metrics --------

def gram_arrays(params: MetricParams, e: np.ndarray, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """h_{m,r}(Z_k, Z_l) per row for Z_k = (X[:, k], Y[:, k]) at the points (x, e)."""
    diag = np.array([1.0, 1.0, 1.0 if params.fiber_sign == FiberSign.definite else -1.0])
    e_sq = _dot(e, e, diag)
    if np.any(1.0 + e_sq <= 0.0):
        raise DomainError("1 + <e,e> must be positive")
    omega_m = (1.0 / (1.0 + e_sq)) ** params.m
    along_e = np.einsum("nki,i,ni->nk", Y, diag, e)
    fiber = np.einsum("nki,i,nli->nkl", Y, diag, Y) + params.r * np.einsum("nk,nl->nkl", along_e, along_e)
    horizontal = np.einsum("nki,i,nli->nkl", X, diag, X)
    return horizontal + params.sign * omega_m[:, None, None] * fiber


def _check_params(params: MetricParams, batch: CoveringBatch) -> None:
    expected = FiberSign.definite if batch.kind == GroupKind.su2 else FiberSign.indefinite
    if params.fiber_sign != expected:
        raise InvalidInputError(f"{batch.kind.value} covers a base that needs the {expected.value} metric")
    if not math.isclose(params.c, batch.c, rel_tol=1e-12):
        raise InvalidInputError(f"metric parameters are for c={params.c} but the covering map targets c={batch.c}")


def closed_gram_arrays(params: MetricParams, batch: CoveringBatch, tilde: Optional[TildeArrays] = None) -> np.ndarray:
    """Gram of the frame images under h_{m,r}, shape (n, 3, 3)."""
    _check_params(params, batch)
    tilde = tilde or tilde_arrays(batch)
    X, Y = frame_image_arrays(batch, tilde)
    return gram_arrays(params, tilde.e, X, Y)


# -------- Finite differences --------

def _retract_rows(batch: CoveringBatch, P: np.ndarray) -> np.ndarray:
    q = _dot(P, P, _SOURCE_DIAG[batch.kind]) * batch.kappa
    if np.any(q <= 0.0):
        raise DomainError("cannot retract a stencil point onto the source space")
    return P / np.sqrt(q * (batch.c / 4.0))[:, None]


def numeric_dF_arrays(
    batch: CoveringBatch, V: np.ndarray, step: float = FIRST_DERIVATIVE_STEP
) -> Tuple[np.ndarray, np.ndarray]:
    """Central difference of F along retract(p +- step V) per row."""
    x_plus, e_plus = covering_arrays(batch, _retract_rows(batch, batch.points + V * step))
    x_minus, e_minus = covering_arrays(batch, _retract_rows(batch, batch.points - V * step))
    return (x_plus - x_minus) / (2.0 * step), (e_plus - e_minus) / (2.0 * step)


def _exp_rows(kind: GroupKind, c: float, x: np.ndarray, w: np.ndarray) -> np.ndarray:
    diag = _BASE_DIAG[kind]
    norm = np.sqrt(np.maximum(_dot(w, w, diag), 0.0))
    z = math.sqrt(c) * norm
    z2 = z * z
    small = norm < EXP_SERIES_BRANCH
    safe = np.where(small, 1.0, z)
    if kind == GroupKind.su2:
        co = np.where(small, 1.0 - z2 / 2.0 + z2 * z2 / 24.0, np.cos(z))
        sinc = np.where(small, 1.0 - z2 / 6.0 + z2 * z2 / 120.0, np.sin(z) / safe)
    else:
        co = np.where(small, 1.0 + z2 / 2.0 + z2 * z2 / 24.0, np.cosh(z))
        sinc = np.where(small, 1.0 + z2 / 6.0 + z2 * z2 / 120.0, np.sinh(z) / safe)
    return x * co[:, None] + w * sinc[:, None]


def pullback_gram_arrays(
    params: MetricParams, batch: CoveringBatch, step: float = CONNECTION_STENCIL_STEP
) -> np.ndarray:
    """(F^* h_{m,r}) in the frame {X1, X2, X3} per row, split by the definition of K.

    Along u -> retract(p + u X_i) the image curve is split into (d pi, K) by
    transporting e(t) back to x along the geodesic arc and differentiating
    exp_x of the difference with the five-point stencil.
    """
    _check_params(params, batch)
    kind, c = batch.kind, batch.c
    diag = _BASE_DIAG[kind]
    radius_sq = (1.0 if kind == GroupKind.su2 else -1.0) / c
    x0, e0 = covering_arrays(batch)
    frames = frame_arrays(batch)
    Xs, Ys = [], []
    for i in range(3):
        xs, ks = [], []
        for t in (-2.0 * step, -step, step, 2.0 * step):
            x_t, e_t = covering_arrays(batch, _retract_rows(batch, batch.points + frames[:, i] * t))
            denom = radius_sq + _dot(x0, x_t, diag)
            if np.any(np.abs(denom) < 1e-300):
                raise DomainError("antipodal stencil points: transport along the arc is not unique")
            back = e_t - (x0 + x_t) * (_dot(x0, e_t, diag) / denom)[:, None]
            w = _project(x0, back - e0, diag)
            xs.append(x_t)
            ks.append(_exp_rows(kind, c, x0, w))
        Xs.append(_project(x0, five_point(xs, step), diag))
        Ys.append(_project(x0, five_point(ks, step), diag))
    return gram_arrays(params, e0, np.stack(Xs, axis=1), np.stack(Ys, axis=1))

