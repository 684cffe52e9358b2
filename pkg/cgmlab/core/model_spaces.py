"""Embedded constant-curvature model spaces S^2(c), S^3(c), H^2(c), H^3_1(c).

Points and tangent vectors live in a pseudo-Euclidean ambient space R^n_nu
whose minus slots are the trailing coordinates. Every space is the level set
<x, x> = kappa / c with kappa = +1 for spheres and -1 for hyperbolic kinds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np

from cgmlab.config import CONTAINS_TOL, EXP_SERIES_BRANCH, TANGENT_TOL
from cgmlab.errors import DomainError, InvalidInputError
from cgmlab.schemas import SpaceKind


# -------- Ambient scalar product --------

@dataclass(frozen=True)
class Signature:
    plus_count: int
    minus_count: int

    def __post_init__(self) -> None:
        if self.plus_count < 0 or self.minus_count < 0:
            raise InvalidInputError(f"negative signature counts {self}")
        if self.plus_count + self.minus_count not in (3, 4):
            raise InvalidInputError(
                f"signature ({self.plus_count},{self.minus_count}) must have 3 or 4 slots"
            )

    @property
    def dim(self) -> int:
        return self.plus_count + self.minus_count

    @property
    def diag(self) -> np.ndarray:
        return np.array([1.0] * self.plus_count + [-1.0] * self.minus_count)


@dataclass(frozen=True, eq=False)
class AmbientVector:
    """A point or tangent vector of R^n_nu; immutable."""

    components: np.ndarray
    signature: Signature

    def __post_init__(self) -> None:
        arr = np.array(self.components, dtype=float)
        if arr.shape != (self.signature.dim,):
            raise InvalidInputError(
                f"expected {self.signature.dim} components, got shape {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    def __getitem__(self, i: int) -> float:
        return float(self.components[i])

    def __len__(self) -> int:
        return self.signature.dim

    def _other(self, other: "AmbientVector") -> np.ndarray:
        if not isinstance(other, AmbientVector):
            return NotImplemented
        if other.signature != self.signature:
            raise InvalidInputError(
                f"signature mismatch: {self.signature} vs {other.signature}"
            )
        return other.components

    def __add__(self, other: "AmbientVector") -> "AmbientVector":
        return AmbientVector(self.components + self._other(other), self.signature)

    def __sub__(self, other: "AmbientVector") -> "AmbientVector":
        return AmbientVector(self.components - self._other(other), self.signature)

    def __mul__(self, scalar: float) -> "AmbientVector":
        return AmbientVector(self.components * float(scalar), self.signature)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "AmbientVector":
        return AmbientVector(self.components / float(scalar), self.signature)

    def __neg__(self) -> "AmbientVector":
        return AmbientVector(-self.components, self.signature)

    def allclose(self, other: "AmbientVector", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.components, self._other(other), rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        comps = ", ".join(f"{v:.6g}" for v in self.components)
        return f"AmbientVector(({comps}), {self.signature.plus_count},{self.signature.minus_count})"


def ambient_dot(u: AmbientVector, v: AmbientVector) -> float:
    """Signed scalar product: plus slots minus minus slots."""
    if u.signature != v.signature:
        raise InvalidInputError(f"signature mismatch: {u.signature} vs {v.signature}")
    return float(np.dot(u.components * u.signature.diag, v.components))


# -------- Model spaces --------

_SIGNATURES = {
    SpaceKind.sphere2: Signature(3, 0),
    SpaceKind.sphere3: Signature(4, 0),
    SpaceKind.hyperbolic_plane: Signature(2, 1),
    SpaceKind.anti_de_sitter3: Signature(2, 2),
}


@dataclass(frozen=True)
class ModelSpace:
    kind: SpaceKind
    c: float

    def __post_init__(self) -> None:
        if not (self.c > 0 and math.isfinite(self.c)):
            raise InvalidInputError(f"curvature scale c must be positive, got {self.c}")
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        object.__setattr__(self, "c", float(self.c))

    @property
    def signature(self) -> Signature:
        return _SIGNATURES[self.kind]

    @property
    def dim(self) -> int:
        return self.signature.dim - 1

    @property
    def is_sphere(self) -> bool:
        return self.kind in (SpaceKind.sphere2, SpaceKind.sphere3)

    @property
    def kappa(self) -> float:
        return 1.0 if self.is_sphere else -1.0

    @property
    def radius_sq(self) -> float:
        """Value of <x, x> on the space."""
        return self.kappa / self.c

    def unit(self) -> "ModelSpace":
        return ModelSpace(self.kind, 1.0)

    def rescaled(self, c: float) -> "ModelSpace":
        return ModelSpace(self.kind, c)

    def vector(self, values: Union[Iterable[float], np.ndarray]) -> AmbientVector:
        return AmbientVector(np.asarray(values, dtype=float), self.signature)

    def zero(self) -> AmbientVector:
        return AmbientVector(np.zeros(self.signature.dim), self.signature)


def sphere2(c: float = 1.0) -> ModelSpace:
    return ModelSpace(SpaceKind.sphere2, c)


def sphere3(c: float = 1.0) -> ModelSpace:
    return ModelSpace(SpaceKind.sphere3, c)


def hyperbolic_plane(c: float = 1.0) -> ModelSpace:
    return ModelSpace(SpaceKind.hyperbolic_plane, c)


def anti_de_sitter3(c: float = 1.0) -> ModelSpace:
    return ModelSpace(SpaceKind.anti_de_sitter3, c)


@dataclass(frozen=True, eq=False)
class FramePoint:
    x: AmbientVector
    frame: Tuple[AmbientVector, AmbientVector, AmbientVector]

    def gram(self) -> np.ndarray:
        return np.array([[ambient_dot(a, b) for b in self.frame] for a in self.frame])

    def coefficients(self, v: AmbientVector) -> np.ndarray:
        """Components of a tangent vector in the (pseudo-)orthonormal frame."""
        signs = np.diag(self.gram())
        return np.array([ambient_dot(v, xi) for xi in self.frame]) / np.sign(signs)


# -------- Validation helpers --------

def _require_signature(space: ModelSpace, v: AmbientVector, what: str = "vector") -> None:
    if v.signature != space.signature:
        raise InvalidInputError(
            f"{what} signature {v.signature} does not match {space.kind.value}"
        )


def _euclidean_sq(v: AmbientVector) -> float:
    return float(np.dot(v.components, v.components))


def near_space(space: ModelSpace, x: AmbientVector) -> bool:
    """Membership with the tolerance scaled by the Euclidean size of x."""
    _require_signature(space, x, "point")
    if abs(ambient_dot(x, x) - space.radius_sq) > CONTAINS_TOL * max(1.0, _euclidean_sq(x)):
        return False
    if space.kind == SpaceKind.hyperbolic_plane and x[2] <= 0.0:
        return False
    return True


def _require_on(space: ModelSpace, x: AmbientVector) -> None:
    if not near_space(space, x):
        raise InvalidInputError(
            f"point {x!r} is not on {space.kind.value}(c={space.c}): "
            f"<x,x>={ambient_dot(x, x):.17g}"
        )


def _require_tangent(space: ModelSpace, x: AmbientVector, v: AmbientVector) -> None:
    _require_signature(space, v)
    scale = max(1.0, math.sqrt(_euclidean_sq(v))) * max(1.0, math.sqrt(_euclidean_sq(x)))
    if abs(ambient_dot(x, v)) > TANGENT_TOL * scale:
        raise InvalidInputError(f"vector {v!r} is not tangent at {x!r}")


def _require_unit_spacelike(v: AmbientVector) -> None:
    if abs(ambient_dot(v, v) - 1.0) > TANGENT_TOL:
        raise InvalidInputError(f"initial vector must be spacelike unit, <v,v>={ambient_dot(v, v)}")


def require_tangent(space: ModelSpace, x: AmbientVector, v: AmbientVector) -> None:
    _require_tangent(space, x, v)


# -------- Operations --------

def contains(space: ModelSpace, x: AmbientVector) -> bool:
    _require_signature(space, x, "point")
    if abs(ambient_dot(x, x) - space.radius_sq) > CONTAINS_TOL:
        return False
    if space.kind == SpaceKind.hyperbolic_plane and x[2] <= 0.0:
        return False
    return True


def retract(space: ModelSpace, x: AmbientVector) -> AmbientVector:
    """Pull a numerically perturbed point back onto the space."""
    _require_signature(space, x, "point")
    q = ambient_dot(x, x)
    if space.is_sphere:
        if q <= 0.0:
            raise DomainError("cannot retract the zero vector onto a sphere")
        return x / (math.sqrt(space.c) * math.sqrt(q))
    if q >= 0.0:
        raise DomainError(f"cannot retract a non-timelike vector onto {space.kind.value}")
    return x / math.sqrt(abs(q) * space.c)


def tangent_project(space: ModelSpace, x: AmbientVector, w: AmbientVector) -> AmbientVector:
    _require_signature(space, w)
    return w - x * (ambient_dot(w, x) / ambient_dot(x, x))


def frame_fields(space: ModelSpace, x: AmbientVector) -> FramePoint:
    """Global frame X1, X2, X3 of S^3(c) (orthonormal) or H^3_1(c) (Gram diag(1,1,-1))."""
    if space.kind not in (SpaceKind.sphere3, SpaceKind.anti_de_sitter3):
        raise InvalidInputError(f"frame_fields needs Sphere3 or AntiDeSitter3, got {space.kind.value}")
    _require_on(space, x)
    x1, x2, x3, x4 = x.components * math.sqrt(space.c)
    X3 = (-x2, x1, -x4, x3)
    if space.kind == SpaceKind.sphere3:
        X2 = (-x3, x4, x1, -x2)
        X1 = (-x4, -x3, x2, x1)
    else:
        X2 = (x3, -x4, x1, -x2)
        X1 = (x4, x3, x2, x1)
    return FramePoint(x, (space.vector(X1), space.vector(X2), space.vector(X3)))


def _cs(space: ModelSpace, z: float) -> Tuple[float, float]:
    if space.is_sphere:
        return math.cos(z), math.sin(z)
    return math.cosh(z), math.sinh(z)


def geodesic(space: ModelSpace, x: AmbientVector, v: AmbientVector, t: float) -> AmbientVector:
    _require_on(space, x)
    _require_tangent(space, x, v)
    _require_unit_spacelike(v)
    s = math.sqrt(space.c)
    co, si = _cs(space, s * t)
    return x * co + v * (si / s)


def geodesic_velocity(space: ModelSpace, x: AmbientVector, v: AmbientVector, t: float) -> AmbientVector:
    """d/dt of geodesic(x, v, t); unit spacelike for all t."""
    _require_on(space, x)
    _require_tangent(space, x, v)
    s = math.sqrt(space.c)
    co, si = _cs(space, s * t)
    return x * (-space.kappa * s * si) + v * co


def exp_map(space: ModelSpace, x: AmbientVector, w: AmbientVector) -> AmbientVector:
    if space.kind not in (SpaceKind.sphere2, SpaceKind.hyperbolic_plane):
        raise InvalidInputError(f"exp_map needs Sphere2 or HyperbolicPlane, got {space.kind.value}")
    _require_on(space, x)
    _require_tangent(space, x, w)
    n = math.sqrt(max(ambient_dot(w, w), 0.0))
    z = math.sqrt(space.c) * n
    if n < EXP_SERIES_BRANCH:
        z2 = z * z
        # sin(z)/z, sinh(z)/z and cos/cosh to fourth order
        if space.is_sphere:
            co, sinc = 1.0 - z2 / 2.0 + z2 * z2 / 24.0, 1.0 - z2 / 6.0 + z2 * z2 / 120.0
        else:
            co, sinc = 1.0 + z2 / 2.0 + z2 * z2 / 24.0, 1.0 + z2 / 6.0 + z2 * z2 / 120.0
    else:
        co, si = _cs(space, z)
        sinc = si / z
    return x * co + w * sinc


def parallel_transport(
    space: ModelSpace, x: AmbientVector, v: AmbientVector, w: AmbientVector, t: float
) -> AmbientVector:
    """Transport w along geodesic(x, v, .) to parameter t.

    The component of w along v follows the unit velocity; the rest is normal to
    the plane span(x, v) containing the geodesic and stays fixed.
    """
    _require_on(space, x)
    _require_unit_spacelike(v)
    _require_tangent(space, x, w)
    a = ambient_dot(w, v)
    w_perp = w - v * a
    return geodesic_velocity(space, x, v, t) * a + w_perp


def transport_between(space: ModelSpace, y: AmbientVector, x: AmbientVector, v: AmbientVector) -> AmbientVector:
    """Parallel transport of v in T_y along the geodesic arc from y to x."""
    denom = space.radius_sq + ambient_dot(x, y)
    if abs(denom) < 1e-300:
        raise DomainError("antipodal points: transport along the arc is not unique")
    return v - (x + y) * (ambient_dot(x, v) / denom)


def stereographic_inverse(space: ModelSpace, zeta: complex) -> AmbientVector:
    if space.kind not in (SpaceKind.sphere2, SpaceKind.hyperbolic_plane):
        raise InvalidInputError(
            f"stereographic_inverse needs Sphere2 or HyperbolicPlane, got {space.kind.value}"
        )
    zeta = complex(zeta)
    a2 = abs(zeta) ** 2
    if space.is_sphere:
        unit = (2.0 * zeta.real, 2.0 * zeta.imag, a2 - 1.0)
        denom = a2 + 1.0
    else:
        if a2 >= 1.0:
            raise DomainError(f"|zeta| = {abs(zeta)} must be < 1 for the hyperbolic plane")
        unit = (2.0 * zeta.real, 2.0 * zeta.imag, 1.0 + a2)
        denom = 1.0 - a2
    # homothety onto curvature c
    return space.vector(np.array(unit) / (denom * math.sqrt(space.c)))


def stereographic_frame(space: ModelSpace, zeta: complex) -> Tuple[AmbientVector, AmbientVector]:
    """Orthonormal frame (E1, E2) along the coordinate lines of stereographic_inverse."""
    zeta = complex(zeta)
    u1, u2 = zeta.real, zeta.imag
    if space.kind == SpaceKind.sphere2:
        s = 1.0 + u1 * u1 + u2 * u2
        e1 = (s - 2.0 * u1 * u1, -2.0 * u1 * u2, 2.0 * u1)
        e2 = (-2.0 * u1 * u2, s - 2.0 * u2 * u2, 2.0 * u2)
    elif space.kind == SpaceKind.hyperbolic_plane:
        s = 1.0 - u1 * u1 - u2 * u2
        if s <= 0.0:
            raise DomainError(f"|zeta| = {abs(zeta)} must be < 1 for the hyperbolic plane")
        e1 = (s + 2.0 * u1 * u1, 2.0 * u1 * u2, 2.0 * u1)
        e2 = (2.0 * u1 * u2, s + 2.0 * u2 * u2, 2.0 * u2)
    else:
        raise InvalidInputError(f"stereographic_frame needs a 2-dimensional space, got {space.kind.value}")
    return space.vector(np.array(e1) / s), space.vector(np.array(e2) / s)


def fiber_action(x: AmbientVector, t: float) -> AmbientVector:
    """e^{it} (z1, z2) with z1 = x1 + i x2, z2 = x3 + i x4."""
    x1, x2, x3, x4 = x.components
    co, si = math.cos(t), math.sin(t)
    return AmbientVector(
        (x1 * co - x2 * si, x2 * co + x1 * si, x3 * co - x4 * si, x4 * co + x3 * si),
        x.signature,
    )


def hopf_coordinates(space: ModelSpace, eta: float, xi1: float, xi2: float) -> AmbientVector:
    if space.kind != SpaceKind.sphere3:
        raise InvalidInputError("hopf_coordinates parametrizes Sphere3 only")
    r = 1.0 / math.sqrt(space.c)
    return space.vector((
        r * math.cos(eta) * math.cos(xi1),
        r * math.cos(eta) * math.sin(xi1),
        r * math.sin(eta) * math.cos(xi2),
        r * math.sin(eta) * math.sin(xi2),
    ))
