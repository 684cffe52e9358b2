"""SU(2) / SU(1,1) bridge between the 3-dimensional model spaces and unit tangent bundles.

The covering map F = phi o rho o psi o iota sends S^3(c/4) onto T^1 S^2(c) and
H^3_1(c/4) onto T^1 H^2(c), two-to-one; its projection to the base is the
(hyperbolic) Hopf map.

Lie algebra elements are carried as 3-vectors in the basis (e1, e2, e3); the
same 3-vectors are ambient coordinates of R^3 (resp. R^3_1), so the columns of
rho(A) are the images A e_i A^-1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from cgmlab.config import GROUP_TOL
from cgmlab.core.bundle import (
    BundlePoint,
    BundleTangent,
    CurveDatum,
    horizontal_lift,
    lift_pair,
    vertical_lift,
)
from cgmlab.core.model_spaces import (
    AmbientVector,
    ModelSpace,
    Signature,
    anti_de_sitter3,
    frame_fields,
    hyperbolic_plane,
    near_space,
    require_tangent,
    sphere2,
    sphere3,
)
from cgmlab.errors import InvalidInputError
from cgmlab.schemas import GroupKind, RotationKind

logger = logging.getLogger(__name__)

_I = 1j


# -------- Lie algebras --------

_BASIS = {
    GroupKind.su2: (
        np.array([[0, _I], [_I, 0]], dtype=complex),
        np.array([[0, -1], [1, 0]], dtype=complex),
        np.array([[_I, 0], [0, -_I]], dtype=complex),
    ),
    GroupKind.su11: (
        np.array([[0, -_I], [_I, 0]], dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[_I, 0], [0, -_I]], dtype=complex),
    ),
}


@dataclass(frozen=True, eq=False)
class LieBasis:
    kind: GroupKind
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    def as_tuple(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.e1, self.e2, self.e3

    def gram(self) -> np.ndarray:
        """Trace-form Gram matrix of (e1, e2, e3)."""
        basis = np.eye(3)
        return np.array([[lie_dot(self.kind, u, v) for v in basis] for u in basis])


def lie_basis(kind: GroupKind) -> LieBasis:
    e1, e2, e3 = _BASIS[GroupKind(kind)]
    return LieBasis(GroupKind(kind), e1.copy(), e2.copy(), e3.copy())


def lie_matrix(kind: GroupKind, v: np.ndarray) -> np.ndarray:
    e1, e2, e3 = _BASIS[GroupKind(kind)]
    return v[0] * e1 + v[1] * e2 + v[2] * e3


def lie_coordinates(kind: GroupKind, M: np.ndarray) -> np.ndarray:
    """Inverse of lie_matrix; both algebras share the extraction below."""
    return np.array([M[1, 0].imag, M[1, 0].real, M[0, 0].imag])


def lie_bracket(kind: GroupKind, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    U, V = lie_matrix(kind, u), lie_matrix(kind, v)
    return lie_coordinates(kind, U @ V - V @ U)


def lie_dot(kind: GroupKind, u: np.ndarray, v: np.ndarray) -> float:
    """-(1/2) Tr(XY) on su(2), +(1/2) Tr(XY) on su(1,1)."""
    kind = GroupKind(kind)
    trace = np.trace(lie_matrix(kind, u) @ lie_matrix(kind, v)).real
    return float(-0.5 * trace if kind == GroupKind.su2 else 0.5 * trace)


# -------- Groups --------

@dataclass(frozen=True)
class GroupElement:
    a: complex
    b: complex
    kind: GroupKind

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "kind", GroupKind(self.kind))
        norm = self.norm()
        scale = max(1.0, abs(self.a) ** 2 + abs(self.b) ** 2)
        if abs(norm - 1.0) > GROUP_TOL * scale:
            raise InvalidInputError(f"{self.kind.value} element has norm {norm!r}, expected 1")

    def norm(self) -> float:
        if self.kind == GroupKind.su2:
            return abs(self.a) ** 2 + abs(self.b) ** 2
        return abs(self.a) ** 2 - abs(self.b) ** 2

    def matrix(self) -> np.ndarray:
        a, b = self.a, self.b
        if self.kind == GroupKind.su2:
            return np.array([[a, -b.conjugate()], [b, a.conjugate()]], dtype=complex)
        return np.array([[a, b.conjugate()], [b, a.conjugate()]], dtype=complex)

    @classmethod
    def from_matrix(cls, kind: GroupKind, M: np.ndarray) -> "GroupElement":
        return cls(complex(M[0, 0]), complex(M[1, 0]), kind)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.a.conjugate(), -self.b, self.kind)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if other.kind != self.kind:
            raise InvalidInputError(f"cannot multiply {self.kind.value} by {other.kind.value}")
        return GroupElement.from_matrix(self.kind, self.matrix() @ other.matrix())

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b, self.kind)

    def z_pair(self) -> Tuple[complex, complex]:
        """(z1, z2) of the model-space point psi maps onto this element."""
        if self.kind == GroupKind.su2:
            return self.a, self.b
        return _I * self.b.conjugate(), _I * self.a.conjugate()


def group_identity(kind: GroupKind) -> GroupElement:
    return GroupElement(1.0, 0.0, kind)


@dataclass(frozen=True, eq=False)
class RotationMatrix:
    entries: np.ndarray
    kind: RotationKind

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=float)
        if arr.shape != (3, 3):
            raise InvalidInputError(f"rotation matrix must be 3x3, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "kind", RotationKind(self.kind))
        residual = self.invariant_residual()
        scale = max(1.0, float(np.max(np.abs(arr))) ** 2)
        if residual > GROUP_TOL * scale:
            raise InvalidInputError(f"{self.kind.value} invariants violated by {residual:.3g}")

    @property
    def J(self) -> np.ndarray:
        return np.diag([1.0, 1.0, 1.0]) if self.kind == RotationKind.so3 else np.diag([1.0, 1.0, -1.0])

    def invariant_residual(self) -> float:
        """max of |M^T J M - J|, |det M - 1| and the time-orientation defect."""
        M = self.entries
        orth = float(np.max(np.abs(M.T @ self.J @ M - self.J)))
        det = abs(float(np.linalg.det(M)) - 1.0)
        orient = 0.0 if self.kind == RotationKind.so3 or M[2, 2] > 0 else 1.0
        return max(orth, det, orient)

    def column(self, i: int) -> np.ndarray:
        return self.entries[:, i].copy()

    def __matmul__(self, other: "RotationMatrix") -> "RotationMatrix":
        return RotationMatrix(self.entries @ other.entries, self.kind)


def _group_kind(signature: Signature) -> GroupKind:
    if signature == Signature(4, 0):
        return GroupKind.su2
    if signature == Signature(2, 2):
        return GroupKind.su11
    raise InvalidInputError(f"no group lives on signature {signature}")


def _psi_matrix(kind: GroupKind, x: np.ndarray) -> np.ndarray:
    """psi as a real-linear map R^4 -> 2x2 complex matrices."""
    z1 = complex(x[0], x[1])
    z2 = complex(x[2], x[3])
    if kind == GroupKind.su2:
        return np.array([[z1, -z2.conjugate()], [z2, z1.conjugate()]], dtype=complex)
    return _I * np.array([[z2.conjugate(), -z1], [z1.conjugate(), -z2]], dtype=complex)


# -------- The maps psi, rho, phi, F --------

def psi(x: AmbientVector) -> GroupElement:
    kind = _group_kind(x.signature)
    unit = sphere3(1.0) if kind == GroupKind.su2 else anti_de_sitter3(1.0)
    if not near_space(unit, x):
        raise InvalidInputError(f"psi needs a point of the unit {unit.kind.value}, got {x!r}")
    return GroupElement.from_matrix(kind, _psi_matrix(kind, x.components))


def rho(A: GroupElement) -> RotationMatrix:
    """Explicit adjoint matrix in the basis (e1, e2, e3)."""
    z1, z2 = A.z_pair()
    w = z1 * z2.conjugate()
    p = z1 * z2
    if A.kind == GroupKind.su2:
        s = z1 ** 2 - z2.conjugate() ** 2
        t = z1.conjugate() ** 2 + z2 ** 2
        entries = [
            [s.real, t.imag, 2.0 * w.real],
            [s.imag, t.real, 2.0 * w.imag],
            [-2.0 * p.real, 2.0 * p.imag, abs(z1) ** 2 - abs(z2) ** 2],
        ]
        return RotationMatrix(entries, RotationKind.so3)
    s = z1 ** 2 + z2.conjugate() ** 2
    t = z1 ** 2 - z2.conjugate() ** 2
    entries = [
        [-s.real, -t.imag, 2.0 * w.real],
        [-s.imag, t.real, 2.0 * w.imag],
        [-2.0 * p.real, -2.0 * p.imag, abs(z1) ** 2 + abs(z2) ** 2],
    ]
    return RotationMatrix(entries, RotationKind.so12plus)


def adjoint_columns(A: GroupElement) -> np.ndarray:
    """(A e1 A^-1 | A e2 A^-1 | A e3 A^-1) in Lie coordinates."""
    M = A.matrix()
    Minv = A.inverse().matrix()
    cols = [lie_coordinates(A.kind, M @ e @ Minv) for e in _BASIS[A.kind]]
    return np.column_stack(cols)


def _base_for(kind: RotationKind, c: float) -> ModelSpace:
    return sphere2(c) if kind == RotationKind.so3 else hyperbolic_plane(c)


def phi(R: RotationMatrix, c: float) -> BundlePoint:
    """(c3 / sqrt(c), c1)."""
    base = _base_for(R.kind, c)
    x = base.vector(R.column(2) / math.sqrt(c))
    e = base.vector(R.column(0))
    return BundlePoint(base, x, e, unit=True)


def source_space(p: AmbientVector, c: float) -> ModelSpace:
    """S^3(c/4) or H^3_1(c/4), chosen by the signature of p."""
    if _group_kind(p.signature) == GroupKind.su2:
        return sphere3(c / 4.0)
    return anti_de_sitter3(c / 4.0)


def _to_unit(p: AmbientVector, c: float) -> AmbientVector:
    """Homothety of the (c/4)-model onto the unit model."""
    space = source_space(p, c)
    if not near_space(space, p):
        raise InvalidInputError(f"{p!r} is not on {space.kind.value}(c={space.c})")
    return p * (math.sqrt(c) / 2.0)


def covering_F(p: AmbientVector, c: float) -> BundlePoint:
    return phi(rho(psi(_to_unit(p, c))), c)


def hopf(p: AmbientVector, c: float) -> AmbientVector:
    """pi o covering_F in closed form."""
    A = psi(_to_unit(p, c))
    z1, z2 = A.z_pair()
    w = z1 * z2.conjugate()
    if A.kind == GroupKind.su2:
        third, base = abs(z1) ** 2 - abs(z2) ** 2, sphere2(c)
    else:
        third, base = abs(z1) ** 2 + abs(z2) ** 2, hyperbolic_plane(c)
    return base.vector(np.array([2.0 * w.real, 2.0 * w.imag, third]) / math.sqrt(c))


# -------- Differentials --------

@dataclass(frozen=True, eq=False)
class TildeFrame:
    """The images e~1, e~2, e~3 as raw (xdot, edot) pairs at F(p)."""

    at: BundlePoint
    e: AmbientVector
    f: AmbientVector
    x_tilde: AmbientVector
    e1: CurveDatum
    e2: CurveDatum
    e3: CurveDatum

    def as_tuple(self) -> Tuple[CurveDatum, CurveDatum, CurveDatum]:
        return self.e1, self.e2, self.e3


# d psi(2 X_i / sqrt(c)) = sigma_i A e_i for the stated psi and frame
_SIGMA = {
    GroupKind.su2: (1.0, 1.0, 1.0),
    GroupKind.su11: (1.0, -1.0, -1.0),
}


def tilde_frame(p: AmbientVector, c: float) -> TildeFrame:
    A = psi(_to_unit(p, c))
    bp = phi(rho(A), c)
    base = bp.base
    cols = adjoint_columns(A)
    ad1, ad2, ad3 = (base.vector(cols[:, i]) for i in range(3))
    zero = base.zero()
    s = math.sqrt(c)
    # the hyperbolic e~2 carries +2 A e3 A^-1 in its fibre slot
    fiber_sign = -1.0 if A.kind == GroupKind.su2 else 1.0
    return TildeFrame(
        at=bp,
        e=ad1,
        f=-ad2,
        x_tilde=ad3 / s,
        e1=CurveDatum(ad2 * (-2.0 / s), zero),
        e2=CurveDatum(ad1 * (2.0 / s), ad3 * (2.0 * fiber_sign)),
        e3=CurveDatum(zero, ad2 * 2.0),
    )


def dF_ambient(p: AmbientVector, c: float, V: AmbientVector) -> CurveDatum:
    """dF_p(V) as a raw pair, from d rho(A Y) = rho(A) o ad(Y).

    Y = A^-1 d psi(V) in Lie coordinates; the columns c3 / sqrt(c) and c1 of
    rho move by Ad_A [Y, e3] / sqrt(c) and Ad_A [Y, e1].
    """
    space = source_space(p, c)
    require_tangent(space, p, V)
    unit_v = V.components * (math.sqrt(c) / 2.0)
    A = psi(_to_unit(p, c))
    Y = lie_coordinates(A.kind, A.inverse().matrix() @ _psi_matrix(A.kind, unit_v))
    ad = adjoint_columns(A)
    e1, _, e3 = np.eye(3)
    base = _base_for(RotationKind.so3 if A.kind == GroupKind.su2 else RotationKind.so12plus, c)
    xdot = ad @ lie_bracket(A.kind, Y, e3) / math.sqrt(c)
    edot = ad @ lie_bracket(A.kind, Y, e1)
    return CurveDatum(base.vector(xdot), base.vector(edot))


def _combine(frame: TildeFrame, weights: Sequence[float]) -> BundleTangent:
    """lift_pair of sum_k w_k e~_k; the connection map is linear in the datum."""
    bp = frame.at
    xdot, edot = bp.base.zero(), bp.base.zero()
    for w, datum in zip(weights, frame.as_tuple()):
        xdot = xdot + datum.xdot * w
        edot = edot + datum.edot * w
    return lift_pair(bp, CurveDatum(xdot, edot))


def dF_closed(p: AmbientVector, c: float, V: AmbientVector) -> BundleTangent:
    """Expand V in {2 X_i / sqrt(c)} and send the basis to sigma_i e~_i."""
    space = source_space(p, c)
    require_tangent(space, p, V)
    fp = frame_fields(space, p)
    coeffs = fp.coefficients(V) * (math.sqrt(c) / 2.0)
    sigma = np.array(_SIGMA[_group_kind(p.signature)])
    return _combine(tilde_frame(p, c), coeffs * sigma)


def frame_images(p: AmbientVector, c: float) -> Tuple[BundleTangent, BundleTangent, BundleTangent]:
    """dF_closed(X1), dF_closed(X2), dF_closed(X3) at p, from a single tilde frame.

    X_k has coordinates sqrt(c)/2 delta_k in the basis {2 X_i / sqrt(c)}.
    """
    frame = tilde_frame(p, c)
    half = math.sqrt(c) / 2.0
    sigma = _SIGMA[_group_kind(p.signature)]
    return tuple(  # type: ignore[return-value]
        _combine(frame, [half * sigma[k] if i == k else 0.0 for i in range(3)]) for k in range(3)
    )


def prop_identities(p: AmbientVector, c: float) -> Tuple[float, float, float]:
    """Residuals of (sqrt(c)/2) e~2 = e^h, (sqrt(c)/2) e~1 = f^h, e~3 = -2 f^v."""
    frame = tilde_frame(p, c)
    bp = frame.at
    half = math.sqrt(c) / 2.0
    r2 = (lift_pair(bp, frame.e2) * half).max_abs_diff(horizontal_lift(bp, frame.e))
    r1 = (lift_pair(bp, frame.e1) * half).max_abs_diff(horizontal_lift(bp, frame.f))
    r3 = lift_pair(bp, frame.e3).max_abs_diff(vertical_lift(bp, frame.f * -2.0))
    return r2, r1, r3
